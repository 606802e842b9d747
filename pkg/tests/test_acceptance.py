"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary."""

import io
import random
import time
from itertools import product
from math import comb

import pytest

from tracechain.canon import canonical_form
from tracechain.cli import run_command
from tracechain.engine import (
    OPTIMAL,
    SearchOptions,
    TraceState,
    U,
    W,
    compute,
    compute_u,
    compute_w,
    enumerate_extremal,
    update_state,
)
from tracechain.oracle import exhaustive_optimum, oracle_grid
from tracechain.setfam import (
    ALMOST,
    MAXIMAL,
    KFamily,
    Trace,
    brute_force_has_chain,
    has_almost_maximal_chain,
    has_maximal_chain,
    is_admissible,
    is_w_admissible,
    k_subsets,
    relabel,
    small_ground_family,
    star_family,
    w_formula,
)

RESULTS: list[str] = []


def record(cid: str, title: str, ok: bool, elapsed: float, limit: float, detail: str = ""):
    ok = ok and elapsed <= limit
    line = f"{cid:<4} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.1f}s / limit {limit:.0f}s)"
    if detail:
        line += f"  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


# -- 1 ------------------------------------------------------------------------

def test_c1_base_cases():
    t0 = time.monotonic()
    bad = []
    for n in range(1, 7):
        for k in range(1, n + 1):
            res = compute_w(n, k, 1)
            if not (res.status == OPTIMAL and res.optimum == 1):
                bad.append((n, k, 1, res.optimum))
            for r in range(k + 1, n + 1):
                res = compute_w(n, k, r)
                if not (res.status == OPTIMAL and res.optimum == comb(n, k)):
                    bad.append((n, k, r, res.optimum))
    ok = record("C1", "base cases W(n,k,1)=1 and W(n,k,r)=C(n,k) for k<r, n<=6",
                not bad, time.monotonic() - t0, 60, f"mismatches={bad}")
    assert ok


# -- 2 ------------------------------------------------------------------------

def test_c2_r2_threshold():
    t0 = time.monotonic()
    got2 = [compute_w(n, 2, 2) for n in range(4, 9)]
    got3 = [compute_w(n, 3, 2) for n in range(6, 9)]
    ok = (all(r.status == OPTIMAL for r in got2 + got3)
          and [r.optimum for r in got2] == [n - 1 for n in range(4, 9)]
          and [r.optimum for r in got3] == [n - 2 for n in range(6, 9)])
    detail = f"W(n,2,2)={[r.optimum for r in got2]} W(n,3,2)={[r.optimum for r in got3]}"
    assert record("C2", "W(n,2,2)=n-1 (n=4..8), W(n,3,2)=n-2 (n=6..8)", ok,
                  time.monotonic() - t0, 600, detail)


# -- 3 ------------------------------------------------------------------------

def test_c3_anchor_33():
    t0 = time.monotonic()
    a = compute_w(7, 3, 3)
    b = compute_w(6, 3, 3)
    ok = (a.status == OPTIMAL and a.optimum == 15 and is_w_admissible(a.witness, 3)
          and b.optimum >= 11 and is_w_admissible(b.witness, 3) and len(b.witness) == b.optimum)
    assert record("C3", "W(7,3,3)=15 optimal, W(6,3,3)>=11", ok, time.monotonic() - t0, 1800,
                  f"W(7,3,3)={a.optimum} W(6,3,3)={b.optimum} ({b.status})")


# -- 4 ------------------------------------------------------------------------

def test_c4_lemma1_grid():
    t0 = time.monotonic()
    rows = []
    ok = True
    for k in (2, 3):
        for n in range(k + 1, 7):
            u = compute_u(n, k, 2)
            w = compute_w(n - 1, k - 1, 1)
            holds = u.status == w.status == OPTIMAL and k * u.optimum <= n * w.optimum
            ok = ok and holds
            rows.append(f"({n},{k}):{k}*{u.optimum}<={n}*{w.optimum}")
    assert record("C4", "k*U(n,k,2) <= n*W(n-1,k-1,1) on k=2..3, n=k+1..6", ok,
                  time.monotonic() - t0, 600, " ".join(rows))


# -- 5 ------------------------------------------------------------------------

def test_c5_constructions():
    t0 = time.monotonic()
    bad = []
    cells = 0
    for n in range(1, 11):
        for k in range(1, min(5, n) + 1):
            for r in range(1, k + 1):
                cells += 1
                star = star_family(n, k, r)
                if len(star) != w_formula(n, k, r) or not is_w_admissible(star, r):
                    bad.append(("star", n, k, r))
                if n >= k + r - 1 and not is_w_admissible(small_ground_family(n, k, r), r):
                    bad.append(("small", n, k, r))
    assert record("C5", "star/small-ground admissible, |star|=formula, n<=10 k<=5 r<=k",
                  not bad, time.monotonic() - t0, 60, f"cells={cells} bad={bad}")


# -- 6 ------------------------------------------------------------------------

def _grid6():
    return [(mode, n, k, r) for mode in (W, U) for n, k, r in oracle_grid(mode=mode)]


def test_c6_oracle_equivalence():
    t0 = time.monotonic()
    bad = []
    grid = _grid6()
    for mode, n, k, r in grid:
        want = exhaustive_optimum(n, k, r, mode)
        for sym in (True, False):
            res = compute(n, k, r, SearchOptions(mode=mode, symmetry_break=sym, allow_large=True))
            if res.status != OPTIMAL or res.optimum != want:
                bad.append((mode, n, k, r, sym, res.optimum, want))
    assert record("C6", "branch-and-bound (symmetry on/off) equals exhaustive oracle, "
                  "all C(n,k)<=16, W and U", not bad, time.monotonic() - t0, 600,
                  f"cells={len(grid)} bad={bad}")


# -- 7 ------------------------------------------------------------------------

def _random_admissible(rng, n, k, r, mode):
    cands = k_subsets(n, k)
    rng.shuffle(cands)
    chosen = []
    for c in cands:
        if is_admissible(KFamily.from_masks(n, k, chosen + [c]), r, mode):
            chosen.append(c)
    return KFamily.from_masks(n, k, chosen)


def _random_params(rng, mode, max_n=7):
    while True:
        n = rng.randint(3, max_n)
        k = rng.randint(1, n - 1)
        r = rng.randint(2 if mode == ALMOST else 1, n)
        if comb(n, k) <= 40:
            return n, k, r


def test_c7_property_suites():
    t0 = time.monotonic()
    rng = random.Random(20241015)
    failures = {}

    # heredity
    v = 0
    for _ in range(1000):
        mode = rng.choice((MAXIMAL, ALMOST))
        n, k, r = _random_params(rng, mode)
        f = _random_admissible(rng, n, k, r, mode)
        sub = [m for m in f.members if rng.random() < 0.5]
        if not is_admissible(KFamily.from_masks(n, k, sub), r, mode):
            v += 1
    failures["heredity"] = v

    # incremental state vs recount
    v = 0
    for _ in range(1000):
        mode = rng.choice((W, U))
        n, k, r = _random_params(rng, MAXIMAL if mode == W else ALMOST, max_n=6)
        st = TraceState(n, k, r, mode)
        cands = k_subsets(n, k)
        chain = MAXIMAL if mode == W else ALMOST
        for _ in range(rng.randint(1, 25)):
            a = rng.choice(cands)
            if a in st.chosen:
                update_state(st, "remove", a)
            else:
                _, flag = update_state(st, "add", a)
                grown = KFamily.from_masks(n, k, list(st.chosen | {a}))
                if flag != is_admissible(grown, r, chain):
                    v += 1
        if (st.counts, st.pres) != st.recount() or not is_admissible(st.family(), r, chain):
            v += 1
    # one long run of 1000 actions
    st = TraceState(7, 3, 3, W)
    cands = k_subsets(7, 3)
    for _ in range(1000):
        a = rng.choice(cands)
        if a in st.chosen:
            update_state(st, "remove", a)
        else:
            update_state(st, "add", a)
    if (st.counts, st.pres) != st.recount() or not is_admissible(st.family(), 3, MAXIMAL):
        v += 1
    failures["incremental"] = v

    # permutation invariance
    v = 0
    for _ in range(500):
        n, k, r = _random_params(rng, MAXIMAL)
        cands = k_subsets(n, k)
        f = KFamily.from_masks(n, k, rng.sample(cands, rng.randint(0, min(8, len(cands)))))
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        if is_admissible(f, r, MAXIMAL) != is_admissible(relabel(f, perm), r, MAXIMAL):
            v += 1
    failures["permutation"] = v

    # canonical form
    v = 0
    for _ in range(500):
        n = rng.randint(2, 8)
        k = rng.randint(1, n)
        cands = k_subsets(n, k)
        f = KFamily.from_masks(n, k, rng.sample(cands, rng.randint(0, min(12, len(cands)))))
        c = canonical_form(f)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        if (canonical_form(c.family).family != c.family
                or canonical_form(relabel(f, perm)).family != c.family
                or relabel(f, c.certificate) != c.family):
            v += 1
    failures["canonical"] = v

    # chain DP vs explicit chains
    v = 0
    for r in (1, 2, 3):
        x = (1 << r) - 1
        for pats in range(1 << (1 << r)):
            tr = Trace(x, frozenset(p for p in range(1 << r) if pats >> p & 1))
            v += has_maximal_chain(tr, r) != brute_force_has_chain(tr, r, MAXIMAL)
            v += has_almost_maximal_chain(tr, r) != brute_force_has_chain(tr, r, ALMOST)
    for r in (4, 5):
        x = (1 << r) - 1
        for _ in range(1000):
            density = rng.random()
            tr = Trace(x, frozenset(p for p in range(1 << r) if rng.random() < density))
            v += has_maximal_chain(tr, r) != brute_force_has_chain(tr, r, MAXIMAL)
            v += has_almost_maximal_chain(tr, r) != brute_force_has_chain(tr, r, ALMOST)
    failures["chain_dp"] = v

    ok = not any(failures.values())
    assert record("C7", "property suites (heredity, incremental, permutation, canonical, "
                  "chain DP)", ok, time.monotonic() - t0, 600, f"violations={failures}")


# -- 8 ------------------------------------------------------------------------

def test_c8_uniqueness_and_conjecture2():
    t0 = time.monotonic()
    details = []
    classes = enumerate_extremal(5, 2, 2, W)
    ok = len(classes) == 1 and classes[0].family == canonical_form(star_family(5, 2, 2)).family
    details.append(f"(5,2,2):{len(classes)} class")
    for k, r, n in [(2, 2, 3), (3, 2, 4), (3, 2, 5), (3, 3, 5)]:
        classes = enumerate_extremal(n, k, r, W)
        small = canonical_form(small_ground_family(n, k, r)).family
        cell = (len(classes) == 1 and classes[0].family == small
                and len(small) == comb(k + r - 1, k))
        ok = ok and cell
        details.append(f"(k={k},r={r},n={n}):{'ok' if cell else 'BAD'}")
    assert record("C8", "unique extremal classes: star at (5,2,2), small-ground family on "
                  "Conjecture 2 cells", ok, time.monotonic() - t0, 1800, " ".join(details))


# -- 9 ------------------------------------------------------------------------

def test_c9_determinism():
    t0 = time.monotonic()
    grid = [(W, n, 2, 2) for n in range(4, 9)] + [(W, n, 3, 2) for n in range(6, 9)]
    grid += _grid6()
    mismatch = []
    for mode, n, k, r in grid:
        vals = set()
        for threads in (1, 2, 4):
            res = compute(n, k, r, SearchOptions(mode=mode, thread_count=threads,
                                                 allow_large=True))
            vals.add((res.status, res.optimum))
        if len(vals) != 1:
            mismatch.append((mode, n, k, r, vals))
    # single-thread reruns: identical witnesses and identical CLI bytes
    for mode, n, k, r in grid[:8] + [(W, 7, 3, 3), (W, 6, 3, 3), (U, 6, 3, 2)]:
        a = compute(n, k, r, SearchOptions(mode=mode))
        b = compute(n, k, r, SearchOptions(mode=mode))
        if (a.optimum, a.witness.members) != (b.optimum, b.witness.members):
            mismatch.append(("rerun", mode, n, k, r))
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        run_command(["w", "--n", "7", "--k", "3", "--r", "3", "--format", "records"], buf)
        outs.append(buf.getvalue())
    if outs[0] != outs[1]:
        mismatch.append(("cli", outs))
    assert record("C9", "optima equal across 1/2/4 workers; single-thread reruns identical",
                  not mismatch, time.monotonic() - t0, 600,
                  f"cells={len(grid)} mismatches={mismatch}")
