"""Exact branch-and-bound for W(n,k,r) and U(n,k,r).

The search walks a set-enumeration tree over the k-subsets of [n] in
ascending integer order. Every node holds an admissible family; candidates
that would close a chain on some r-subset are masked out incrementally, so
the tree never visits an inadmissible family.

Candidates, chosen families and blocked sets are Python ints used as bitsets
over candidate indices. A pattern ``S`` on an r-set ``x`` is stored
compressed to r bits (bit t is the t-th element of x).
"""

from __future__ import annotations

import atexit
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from math import comb
from typing import Iterable

from .setfam import (
    InvalidInputError,
    KFamily,
    MAX_N,
    is_admissible,
    iter_bits,
    k_subsets,
    popcount,
    small_ground_family,
    star_family,
    MAXIMAL,
    ALMOST,
)

W = "W"
U = "U"
OPTIMAL = "optimal"
LOWER_BOUND = "lower-bound-only"
PRACTICAL_N = 12

_CHAIN_MODE = {W: MAXIMAL, U: ALMOST}


class SearchIncomplete(RuntimeError):
    """A resource limit stopped an enumeration before it was exhaustive."""

    def __init__(self, message: str, partial: list | None = None):
        super().__init__(message)
        self.partial = partial or []


def chain_mode(mode: str) -> str:
    try:
        return _CHAIN_MODE[mode]
    except KeyError:
        raise InvalidInputError(f"unknown mode {mode!r}, expected W or U") from None


def _start_level(mode: str) -> int:
    return 0 if mode == W else 1


# --------------------------------------------------------------------------
# chain reachability on compressed presence masks
# --------------------------------------------------------------------------

def _reach(pres: int, r: int, start: int) -> tuple[set[int], set[int]]:
    """Present patterns reachable upward from the start level, and present
    patterns from which the full set is reachable upward."""
    full = (1 << r) - 1
    layers: list[list[int]] = [[] for _ in range(r + 1)]
    for bit in iter_bits(pres):
        p = bit.bit_length() - 1
        layers[popcount(p)].append(p)
    fwd: set[int] = set(layers[start])
    for size in range(start + 1, r + 1):
        for p in layers[size]:
            if any(p ^ b in fwd for b in iter_bits(p)):
                fwd.add(p)
    bwd: set[int] = {full} if pres >> full & 1 else set()
    for size in range(r - 1, start - 1, -1):
        for p in layers[size]:
            if any(p | b in bwd for b in iter_bits(full & ~p)):
                bwd.add(p)
    return fwd, bwd


@lru_cache(maxsize=1 << 16)
def has_chain(pres: int, r: int, start: int) -> bool:
    """Does the presence mask contain a chain from level ``start`` up to full?"""
    fwd, _ = _reach(pres, r, start)
    return (1 << r) - 1 in fwd


@lru_cache(maxsize=1 << 16)
def closing_patterns(pres: int, r: int, start: int) -> int:
    """Mask of absent patterns whose arrival would complete a chain."""
    full = (1 << r) - 1
    fwd, bwd = _reach(pres, r, start)
    if start == 0:
        seeds = {0}
    else:
        seeds = {1 << t for t in range(r)}
    for f in fwd:
        for b in iter_bits(full & ~f):
            seeds.add(f | b)
    out = 0
    for p in seeds:
        if pres >> p & 1:
            continue
        lower = popcount(p) == start or any(p ^ b in fwd for b in iter_bits(p))
        upper = p == full or any(p | b in bwd for b in iter_bits(full & ~p))
        if lower and upper:
            out |= 1 << p
    return out


def compress(mask: int, x: int) -> int:
    out = 0
    t = 0
    for b in iter_bits(x):
        if mask & b:
            out |= 1 << t
        t += 1
    return out


class Layout:
    """Precomputed incidence between candidates (k-sets) and r-sets."""

    def __init__(self, n: int, k: int, r: int):
        self.n, self.k, self.r = n, k, r
        self.cands = k_subsets(n, k)
        self.index = {m: i for i, m in enumerate(self.cands)}
        self.xs = k_subsets(n, r)
        self.pat = [tuple(compress(c & x, x) for x in self.xs) for c in self.cands]
        self.by_pat: list[dict[int, int]] = [{} for _ in self.xs]
        for i, row in enumerate(self.pat):
            bit = 1 << i
            for j, p in enumerate(row):
                d = self.by_pat[j]
                d[p] = d.get(p, 0) | bit
        self.meets = [sum(1 << i for i, c in enumerate(self.cands) if c >> e & 1)
                      for e in range(n)]
        self.all_bits = (1 << len(self.cands)) - 1
        self._union: dict[tuple[int, int], int] = {}

    def blocked_by(self, j: int, closing: int) -> int:
        key = (j, closing)
        v = self._union.get(key)
        if v is None:
            d = self.by_pat[j]
            v = 0
            for bit in iter_bits(closing):
                v |= d.get(bit.bit_length() - 1, 0)
            self._union[key] = v
        return v

    def family(self, bits: int) -> KFamily:
        return KFamily(self.n, self.k, tuple(self.cands[b.bit_length() - 1]
                                             for b in iter_bits(bits)))


@lru_cache(maxsize=64)
def layout(n: int, k: int, r: int) -> Layout:
    return Layout(n, k, r)


# --------------------------------------------------------------------------
# incremental state
# --------------------------------------------------------------------------

class TraceState:
    """Pattern multiplicities of the chosen family on every r-subset.

    ``counts[j][p]`` is the number of chosen members meeting ``xs[j]`` in the
    compressed pattern ``p``; ``pres[j]`` is the mask of patterns with a
    nonzero count.
    """

    def __init__(self, n: int, k: int, r: int, mode: str = W):
        chain_mode(mode)
        _check_params(n, k, r, mode)
        self.mode = mode
        self.start = _start_level(mode)
        self.layout = layout(n, k, r)
        self.chosen: set[int] = set()
        self.counts: list[dict[int, int]] = [{} for _ in self.layout.xs]
        self.pres = [0] * len(self.layout.xs)
        self.dirty: set[int] = set()

    @property
    def params(self) -> tuple[int, int, int, str]:
        lay = self.layout
        return lay.n, lay.k, lay.r, self.mode

    def family(self) -> KFamily:
        lay = self.layout
        return KFamily(lay.n, lay.k, tuple(sorted(self.chosen)))

    def _bump(self, mask: int, delta: int) -> None:
        i = self.layout.index[mask]
        for j, p in enumerate(self.layout.pat[i]):
            c = self.counts[j]
            v = c.get(p, 0) + delta
            if v:
                c[p] = v
            else:
                del c[p]
            if (v > 0) != bool(self.pres[j] >> p & 1):
                self.pres[j] ^= 1 << p
                self.dirty.add(j)

    def admissible(self) -> bool:
        r = self.layout.r
        ok = not any(has_chain(self.pres[j], r, self.start) for j in self.dirty)
        self.dirty.clear()
        return ok

    def recount(self) -> tuple[list[dict[int, int]], list[int]]:
        """Counters and presence masks rebuilt from scratch."""
        lay = self.layout
        counts: list[dict[int, int]] = [{} for _ in lay.xs]
        for m in self.chosen:
            for j, p in enumerate(lay.pat[lay.index[m]]):
                counts[j][p] = counts[j].get(p, 0) + 1
        pres = [sum(1 << p for p in c) for c in counts]
        return counts, pres


def update_state(st: TraceState, action: str, A: int) -> tuple[TraceState, bool]:
    """Add or remove ``A`` and report admissibility of the resulting family.

    A rejected add is rolled back, so ``st`` is unchanged when the flag is false.
    """
    lay = st.layout
    if action == "add":
        if A not in lay.index:
            raise InvalidInputError(f"mask {A} is not a {lay.k}-subset of [{lay.n}]")
        if A in st.chosen:
            raise InvalidInputError("set already chosen")
        st.chosen.add(A)
        st._bump(A, +1)
        if st.admissible():
            return st, True
        st.chosen.discard(A)
        st._bump(A, -1)
        st.dirty.clear()
        return st, False
    if action == "remove":
        if A not in st.chosen:
            raise InvalidInputError("set not chosen")
        st.chosen.discard(A)
        st._bump(A, -1)
        # removal cannot create a chain
        st.dirty.clear()
        return st, True
    raise InvalidInputError(f"unknown action {action!r}")


# --------------------------------------------------------------------------
# options and results
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchOptions:
    mode: str = W
    symmetry_break: bool = True
    thread_count: int = 1
    node_limit: int | None = None
    time_limit: float | None = None
    enumerate_all: bool = False
    deterministic_witness: bool = True
    element_bound: bool = True
    allow_large: bool = False

    def __post_init__(self) -> None:
        chain_mode(self.mode)
        if self.thread_count < 1:
            raise InvalidInputError("thread_count must be positive")
        if self.node_limit is not None and self.node_limit <= 0:
            raise InvalidInputError("node_limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise InvalidInputError("time_limit must be positive")


@dataclass
class SearchResult:
    mode: str
    n: int
    k: int
    r: int
    optimum: int
    status: str
    witness: KFamily
    extremal_classes: list | None = None
    nodes_explored: int = 0
    elapsed_time: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _check_params(n: int, k: int, r: int, mode: str, allow_large: bool = True) -> None:
    if not 1 <= n <= MAX_N:
        raise InvalidInputError(f"n={n} outside 1..{MAX_N}")
    if not allow_large and n > PRACTICAL_N:
        raise InvalidInputError(f"n={n} above the practical guard {PRACTICAL_N}")
    if not 0 <= k <= n:
        raise InvalidInputError(f"k={k} not in 0..n")
    lowest = 1 if mode == W else 2
    if r < lowest:
        raise InvalidInputError(f"{mode} mode needs r >= {lowest}")
    if r > n:
        raise InvalidInputError(f"r={r} exceeds n={n}")


# --------------------------------------------------------------------------
# branch and bound
# --------------------------------------------------------------------------

class _Stop(Exception):
    pass


class _Search:
    def __init__(self, lay: Layout, mode: str, opts: SearchOptions, sub_value: int | None,
                 best: int, best_bits: int, target: int | None = None):
        self.lay = lay
        self.r = lay.r
        self.start = _start_level(mode)
        self.opts = opts
        self.sub = sub_value if opts.element_bound else None
        self.best = best
        self.best_bits = best_bits
        self.target = target
        self.found: list[int] = []
        self.nodes = 0
        self.deadline = None if opts.time_limit is None else time.monotonic() + opts.time_limit
        self.pres = [0] * len(lay.xs)

    def _push(self, i: int, blocked: int) -> tuple[list[tuple[int, int]], int]:
        changed = []
        pres = self.pres
        r, start = self.r, self.start
        lay = self.lay
        for j, p in enumerate(lay.pat[i]):
            pj = pres[j]
            if not pj >> p & 1:
                changed.append((j, pj))
                pj |= 1 << p
                pres[j] = pj
                closing = closing_patterns(pj, r, start)
                if closing:
                    blocked |= lay.blocked_by(j, closing)
        return changed, blocked

    def _pop(self, changed: list[tuple[int, int]]) -> None:
        for j, pj in changed:
            self.pres[j] = pj

    def _beats(self, size: int, chosen: int, cand: int) -> bool:
        """Can some extension reach the current goal?"""
        need = self.best + 1 if self.target is None else self.target
        if size + popcount(cand) < need:
            return False
        if self.sub is not None:
            tot = chosen | cand
            total = popcount(tot)
            sub = self.sub
            for meet in self.lay.meets:
                inside = popcount(tot & meet)
                if inside + min(total - inside, sub) < need:
                    return False
        return True

    def _tick(self) -> None:
        self.nodes += 1
        lim = self.opts.node_limit
        if lim is not None and self.nodes > lim:
            raise _Stop
        if self.deadline is not None and self.nodes & 255 == 0 and time.monotonic() > self.deadline:
            raise _Stop

    def _visit(self, size: int, chosen: int) -> bool:
        """Record the node; returns False when the node cannot grow usefully."""
        if self.target is not None:
            if size == self.target:
                self.found.append(chosen)
                return False
        elif size > self.best:
            self.best = size
            self.best_bits = chosen
        return True

    def _dfs(self, size: int, chosen: int, cand: int, blocked: int) -> None:
        self._tick()
        if not self._visit(size, chosen):
            return
        while cand:
            if not self._beats(size, chosen, cand):
                return
            low = cand & -cand
            cand ^= low
            changed, nb = self._push(low.bit_length() - 1, blocked)
            self._dfs(size + 1, chosen | low, cand & ~nb, nb)
            self._pop(changed)

    def run(self, worker: int = 0, workers: int = 1) -> bool:
        """Explore this worker's share of the tree; True when it finished."""
        lay = self.lay
        if not lay.cands:
            return True
        try:
            if self.opts.symmetry_break:
                # any nonempty family has an isomorph containing {1..k}
                _, blocked = self._push(0, 0)
                size, chosen, cand = 1, 1, lay.all_bits & ~1 & ~blocked
            else:
                blocked = 0
                size, chosen, cand = 0, 0, lay.all_bits
            self._tick()
            if not self._visit(size, chosen):
                return True
            slot = 0
            while cand:
                if not self._beats(size, chosen, cand):
                    break
                low = cand & -cand
                cand ^= low
                mine = slot % workers == worker
                slot += 1
                if not mine:
                    continue
                changed, nb = self._push(low.bit_length() - 1, blocked)
                self._dfs(size + 1, chosen | low, cand & ~nb, nb)
                self._pop(changed)
        except _Stop:
            return False
        return True


# exact optima of smaller instances, reused for the element bound
_EXACT: dict[tuple[str, int, int, int], int] = {}


def _sub_value(n: int, k: int, r: int, mode: str, opts: SearchOptions) -> int | None:
    """Exact optimum on a ground set of size ``n`` (used for bounding), or None."""
    if n < k:
        return 0
    if n < r:
        return comb(n, k)
    key = (mode, n, k, r)
    if key in _EXACT:
        return _EXACT[key]
    sub_opts = replace(opts, symmetry_break=True, thread_count=1, enumerate_all=False)
    res = _solve(n, k, r, sub_opts)
    return res.optimum if res.optimal else None


def _seed(n: int, k: int, r: int, mode: str) -> KFamily:
    """An admissible family to start the incumbent from."""
    if mode == W and k < r:
        return KFamily(n, k, tuple(k_subsets(n, k)))
    if mode == W and k >= r:
        return lower_bound_construction(n, k, r)
    if n >= k:
        return KFamily(n, k, (k_subsets(n, k)[0],))
    return KFamily(n, k, ())


def _worker(n: int, k: int, r: int, opts: SearchOptions, sub: int | None, best: int,
            best_bits: int, target: int | None, worker: int, workers: int):
    s = _Search(layout(n, k, r), opts.mode, opts, sub, best, best_bits, target)
    done = s.run(worker, workers)
    return s.best, s.best_bits, s.found, s.nodes, done


_POOLS: dict[int, ProcessPoolExecutor] = {}


def _pool(workers: int) -> ProcessPoolExecutor:
    ex = _POOLS.get(workers)
    if ex is None:
        ex = _POOLS[workers] = ProcessPoolExecutor(max_workers=workers)
    return ex


@atexit.register
def _close_pools() -> None:
    for ex in _POOLS.values():
        ex.shutdown(cancel_futures=True)
    _POOLS.clear()


def _run_split(n: int, k: int, r: int, opts: SearchOptions, sub: int | None, best: int,
               best_bits: int, target: int | None):
    workers = opts.thread_count
    if workers == 1:
        return [_worker(n, k, r, opts, sub, best, best_bits, target, 0, 1)]
    ex = _pool(workers)
    futs = [ex.submit(_worker, n, k, r, opts, sub, best, best_bits, target, w, workers)
            for w in range(workers)]
    return [f.result() for f in futs]


def _solve(n: int, k: int, r: int, opts: SearchOptions) -> SearchResult:
    mode = opts.mode
    t0 = time.monotonic()
    lay = layout(n, k, r)
    sub = _sub_value(n - 1, k, r, mode, opts) if opts.element_bound else None
    seed = _seed(n, k, r, mode)
    seed_bits = sum(1 << lay.index[m] for m in seed.members)
    parts = _run_split(n, k, r, opts, sub, len(seed), seed_bits, None)
    best, best_bits = len(seed), seed_bits
    for b, bits, _, _, _ in parts:
        if b > best:
            best, best_bits = b, bits
    done = all(p[4] for p in parts)
    status = OPTIMAL if done else LOWER_BOUND
    if done:
        _EXACT[(mode, n, k, r)] = best
    return SearchResult(mode, n, k, r, best, status, lay.family(best_bits),
                        nodes_explored=sum(p[3] for p in parts),
                        elapsed_time=time.monotonic() - t0)


def compute(n: int, k: int, r: int, opts: SearchOptions | None = None, cache=None) -> SearchResult:
    """Exact optimum in ``opts.mode``; see :func:`compute_w` and :func:`compute_u`."""
    opts = opts or SearchOptions()
    _check_params(n, k, r, opts.mode, opts.allow_large)
    if cache is not None and not opts.enumerate_all:
        hit = cache.lookup(opts.mode, n, k, r)
        if hit is not None:
            return hit
    res = _solve(n, k, r, opts)
    if opts.enumerate_all and res.optimal:
        try:
            res.extremal_classes = _enumerate(n, k, r, opts, res.optimum)
        except SearchIncomplete as exc:
            res.extremal_classes = exc.partial
            res.status = LOWER_BOUND
    if cache is not None:
        cache.store(res)
    return res


def compute_w(n: int, k: int, r: int, opts: SearchOptions | None = None, cache=None) -> SearchResult:
    """W(n,k,r): largest k-uniform family on [n] with no maximal chain in any r-trace."""
    opts = replace(opts or SearchOptions(), mode=W)
    return compute(n, k, r, opts, cache)


def compute_u(n: int, k: int, r: int, opts: SearchOptions | None = None, cache=None) -> SearchResult:
    """U(n,k,r): the same maximum for almost maximal chains."""
    opts = replace(opts or SearchOptions(), mode=U)
    return compute(n, k, r, opts, cache)


# --------------------------------------------------------------------------
# extremal classes
# --------------------------------------------------------------------------

def _enumerate(n: int, k: int, r: int, opts: SearchOptions, optimum: int) -> list:
    from .canon import canonical_form

    lay = layout(n, k, r)
    if optimum == 0:
        return [canonical_form(KFamily(n, k, ()))]
    sub = _sub_value(n - 1, k, r, opts.mode, opts) if opts.element_bound else None
    # every class has a representative through {1..k}
    sym = replace(opts, symmetry_break=True)
    parts = _run_split(n, k, r, sym, sub, optimum, 0, optimum)
    seen: dict[tuple[int, ...], object] = {}
    for _, _, found, _, _ in parts:
        for bits in found:
            c = canonical_form(lay.family(bits))
            seen.setdefault(c.family.members, c)
    classes = [seen[key] for key in sorted(seen)]
    if not all(p[4] for p in parts):
        raise SearchIncomplete("enumeration stopped by a resource limit", classes)
    return classes


def enumerate_extremal(n: int, k: int, r: int, mode: str = W,
                       opts: SearchOptions | None = None) -> list:
    """All isomorphism classes of maximum admissible families, canonical and sorted.

    Raises :class:`SearchIncomplete` if a limit interrupts either phase.
    """
    opts = replace(opts or SearchOptions(), mode=mode, enumerate_all=False)
    _check_params(n, k, r, mode, opts.allow_large)
    res = _solve(n, k, r, opts)
    if not res.optimal:
        raise SearchIncomplete("optimum not proven within limits")
    return _enumerate(n, k, r, opts, res.optimum)


# --------------------------------------------------------------------------
# constructions
# --------------------------------------------------------------------------

def lower_bound_construction(n: int, k: int, r: int) -> KFamily:
    """The larger of the star and the small-ground family; ties go to the star."""
    if not 1 <= r <= k <= n:
        raise InvalidInputError(f"need n >= k >= r >= 1, got {(n, k, r)}")
    star = star_family(n, k, r)
    if n >= k + r - 1:
        small = small_ground_family(n, k, r)
        if len(small) > len(star):
            return small
    return star


def family_bits(lay: Layout, fam: Iterable[int]) -> int:
    return sum(1 << lay.index[m] for m in fam)


def check_result(res: SearchResult) -> bool:
    """Witness is admissible and, for proven optima, of optimum size."""
    fam = res.witness
    ok = is_admissible(fam, res.r, chain_mode(res.mode))
    return ok and (len(fam) == res.optimum)
