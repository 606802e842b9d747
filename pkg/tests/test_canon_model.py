import random
import re

import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from tracechain.canon import UnsupportedError, canonical_form, is_isomorphic
from tracechain.engine import compute_u, compute_w
from tracechain.model import export_linear_model
from tracechain.setfam import KFamily, k_subsets, relabel, star_family

from conftest import fam


# -- canonical form ---------------------------------------------------------

def test_canonical_examples():
    c = canonical_form(fam(3, 2, "23"))
    assert c.family == fam(3, 2, "12")
    assert relabel(fam(3, 2, "23"), c.certificate) == c.family


def _brute_canon(f: KFamily) -> tuple:
    from itertools import permutations
    return min(relabel(f, p).members for p in permutations(range(1, f.n + 1)))


def test_canonical_matches_brute_force():
    rng = random.Random(3)
    for _ in range(150):
        n = rng.randint(2, 6)
        k = rng.randint(1, n)
        cands = k_subsets(n, k)
        f = KFamily.from_masks(n, k, rng.sample(cands, rng.randint(0, len(cands))))
        assert canonical_form(f).family.members == _brute_canon(f)


def test_canonical_guard():
    with pytest.raises(UnsupportedError):
        canonical_form(KFamily(11, 1, ()))


def test_canonical_symmetric_family_is_fast():
    full = KFamily(10, 3, tuple(k_subsets(10, 3)))
    assert canonical_form(full).family == full
    star = star_family(10, 4, 2)
    assert canonical_form(relabel(star, tuple(range(10, 0, -1)))).family == star


def test_is_isomorphic():
    assert is_isomorphic(fam(4, 2, "12", "34"), fam(4, 2, "13", "24"))
    assert not is_isomorphic(fam(4, 2, "12", "34"), fam(4, 2, "12", "13"))


# -- model export -----------------------------------------------------------

def test_model_counts():
    mod = export_linear_model(3, 2, 2, "W")
    assert len(mod.set_vars) == 3
    assert len(mod.aux_vars) == 12
    assert len(mod.chain_constraints) == 6
    mod = export_linear_model(4, 2, 2, "W")
    assert (len(mod.set_vars), len(mod.aux_vars), len(mod.chain_constraints)) == (6, 24, 12)


def test_model_naming_and_order():
    text = export_linear_model(3, 2, 2, "W").to_lp()
    assert text == export_linear_model(3, 2, 2, "W").to_lp()
    lines = text.splitlines()
    assert lines[1] == "Maximize"
    assert lines[2] == " obj: x_1.2 + x_1.3 + x_2.3"
    assert " chain_1.2_0: y_1.2_e + y_1.2_1 + y_1.2_1.2 <= 2" in lines
    assert lines[-1] == "End"


def parse_lp(text: str):
    """Tiny reader for the exporter's own LP subset."""
    lines = text.splitlines()
    sect = None
    obj, rows, binaries = [], [], []
    for ln in lines:
        s = ln.strip()
        if s in ("Maximize", "Subject To", "Binary", "End"):
            sect = s
            continue
        if not s or s.startswith("\\"):
            continue
        if sect == "Maximize":
            obj = re.findall(r"[xy]_[\w.]+", s.split(":", 1)[1])
        elif sect == "Subject To":
            body = s.split(":", 1)[1]
            lhs, sense, rhs = re.match(r"(.*) (<=|>=) (-?\d+)$", body).groups()
            terms = []
            for sign, coef, var in re.findall(r"([+-]?)\s*(\d+ )?([xy]_[\w.]+)", lhs):
                c = int(coef) if coef else 1
                terms.append((-c if sign == "-" else c, var))
            rows.append((terms, sense, int(rhs)))
        elif sect == "Binary":
            binaries.append(s)
    return obj, rows, binaries


def solve_lp(text: str) -> int:
    obj, rows, binaries = parse_lp(text)
    idx = {v: i for i, v in enumerate(binaries)}
    c = np.zeros(len(binaries))
    for v in obj:
        c[idx[v]] = -1
    A = np.zeros((len(rows), len(binaries)))
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for i, (terms, sense, rhs) in enumerate(rows):
        for coef, v in terms:
            A[i, idx[v]] += coef
        if sense == "<=":
            hi[i] = rhs
        else:
            lo[i] = rhs
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=np.ones(len(binaries)),
               bounds=Bounds(0, 1))
    assert res.success
    return round(-res.fun)


@pytest.mark.parametrize("n,k,r,mode", [(4, 3, 2, "W"), (4, 2, 2, "W"), (5, 2, 2, "U"),
                                        (5, 3, 2, "W"), (5, 3, 3, "W")])
def test_model_optimum_matches_search(n, k, r, mode):
    want = (compute_w if mode == "W" else compute_u)(n, k, r).optimum
    assert solve_lp(export_linear_model(n, k, r, mode).to_lp()) == want


def test_model_433_objective_is_4():
    assert solve_lp(export_linear_model(4, 3, 2, "W").to_lp()) == 4
