"""Exhaustive reference optimum, independent of the branch-and-bound code.

Grows admissible families one member at a time, level by level. Since both
admissibility predicates are hereditary, every admissible family is reached
through admissible subfamilies, so the deepest nonempty level is the optimum.
Only the predicates in :mod:`tracechain.setfam` are shared with the engine.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

from .setfam import ALMOST, MAXIMAL, KFamily, is_admissible

ORACLE_MAX_CANDIDATES = 16


def exhaustive_families(n: int, k: int, r: int, mode: str = "W") -> list[list[KFamily]]:
    """``levels[s]`` lists every admissible family of size s."""
    chain = MAXIMAL if mode == "W" else ALMOST
    cands = sorted(sum(1 << e for e in c) for c in combinations(range(n), k))
    if len(cands) > ORACLE_MAX_CANDIDATES:
        raise ValueError(f"{len(cands)} candidate sets exceed the oracle cap")
    levels: list[list[tuple[int, ...]]] = [[()]]
    while True:
        nxt = []
        for fam in levels[-1]:
            last = fam[-1] if fam else -1
            for c in cands:
                if c <= last:
                    continue
                grown = fam + (c,)
                if is_admissible(KFamily(n, k, grown), r, chain):
                    nxt.append(grown)
        if not nxt:
            break
        levels.append(nxt)
    return [[KFamily(n, k, f) for f in level] for level in levels]


def exhaustive_optimum(n: int, k: int, r: int, mode: str = "W") -> int:
    return len(exhaustive_families(n, k, r, mode)) - 1


def oracle_grid(max_candidates: int = ORACLE_MAX_CANDIDATES, max_n: int = 16,
                mode: str = "W") -> list[tuple[int, int, int]]:
    """Every (n, k, r) with C(n,k) <= max_candidates, r <= k, valid for ``mode``."""
    lowest = 1 if mode == "W" else 2
    out = []
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            if comb(n, k) > max_candidates:
                continue
            for r in range(lowest, k + 1):
                out.append((n, k, r))
    return out
