"""Integer-programming export of the admissibility constraints (CPLEX LP text)."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .engine import W, _check_params, chain_mode
from .setfam import elements_of, iter_bits, k_subsets


@dataclass
class Constraint:
    name: str
    terms: list[tuple[int, str]]  # (coefficient, variable)
    sense: str  # "<=" or ">="
    rhs: int


@dataclass
class LinearModel:
    n: int
    k: int
    r: int
    mode: str
    set_vars: list[str] = field(default_factory=list)
    aux_vars: list[str] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def chain_constraints(self) -> list[Constraint]:
        return [c for c in self.constraints if c.name.startswith("chain_")]

    def to_lp(self) -> str:
        lines = [f"\\ trace-chain model mode={self.mode} n={self.n} k={self.k} r={self.r}",
                 "Maximize",
                 " obj: " + (" + ".join(self.set_vars) if self.set_vars else "0"),
                 "Subject To"]
        for c in self.constraints:
            lines.append(f" {c.name}: {_expr(c.terms)} {c.sense} {c.rhs}")
        lines.append("Binary")
        lines.extend(" " + v for v in self.set_vars + self.aux_vars)
        lines.append("End")
        return "\n".join(lines) + "\n"


def _expr(terms: list[tuple[int, str]]) -> str:
    out = []
    for coef, var in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{mag} {var}"
        out.append(f"{sign} {body}")
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else s


def _tag(mask: int) -> str:
    return ".".join(map(str, elements_of(mask))) or "e"


def set_var(mask: int) -> str:
    return f"x_{_tag(mask)}"


def aux_var(x: int, s: int) -> str:
    return f"y_{_tag(x)}_{_tag(s)}"


def _subsets(x: int) -> list[int]:
    bits = list(iter_bits(x))
    out = []
    for t in range(1 << len(bits)):
        out.append(sum(b for i, b in enumerate(bits) if t >> i & 1))
    return sorted(out)


def export_linear_model(n: int, k: int, r: int, mode: str = W) -> LinearModel:
    """Binary program whose optimum is W(n,k,r) (mode W) or U(n,k,r) (mode U).

    ``y_x_S`` is forced to the OR of the set variables whose members meet x in
    S; every chain of x must then miss at least one of its levels.
    """
    chain_mode(mode)
    _check_params(n, k, r, mode, allow_large=False)
    model = LinearModel(n, k, r, mode)
    cands = k_subsets(n, k)
    model.set_vars = [set_var(a) for a in cands]
    for x in k_subsets(n, r):
        for s in _subsets(x):
            y = aux_var(x, s)
            model.aux_vars.append(y)
            realizers = [a for a in cands if a & x == s]
            for a in realizers:
                model.constraints.append(
                    Constraint(f"lo_{y[2:]}_{_tag(a)}", [(1, y), (-1, set_var(a))], ">=", 0))
            model.constraints.append(
                Constraint(f"hi_{y[2:]}", [(1, y)] + [(-1, set_var(a)) for a in realizers], "<=", 0))
        for t, order in enumerate(permutations(list(iter_bits(x)))):
            levels = [0] if mode == W else []
            acc = 0
            for b in order:
                acc |= b
                levels.append(acc)
            model.constraints.append(
                Constraint(f"chain_{_tag(x)}_{t}", [(1, aux_var(x, s)) for s in levels], "<=",
                           len(levels) - 1))
    return model
