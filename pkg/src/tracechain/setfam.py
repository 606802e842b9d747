"""Sets, uniform families, traces and chain predicates.

A set over the ground set [n] is a plain ``int`` bit mask: element ``i`` lives
at bit ``i - 1``. Families are :class:`KFamily` values holding a sorted tuple
of such masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

MAX_N = 32

MAXIMAL = "maximal"
ALMOST = "almost"


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


# --------------------------------------------------------------------------
# masks
# --------------------------------------------------------------------------

def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_of(elements: Iterable[int]) -> int:
    """Mask of 1-based ``elements``."""
    out = 0
    for e in elements:
        if e < 1:
            raise InvalidInputError(f"element {e} is not positive")
        out |= 1 << (e - 1)
    return out


def elements_of(mask: int) -> list[int]:
    """1-based elements of ``mask`` in increasing order."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def check_mask(mask: int, n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise InvalidInputError(f"ground set size {n} outside 1..{MAX_N}")
    if mask < 0 or mask >> n:
        raise InvalidInputError(f"set {format_set(mask)} is not a subset of [{n}]")


def k_subsets(n: int, k: int) -> list[int]:
    """All k-subsets of [n] as masks, ascending in integer order."""
    return sorted(sum(1 << e for e in c) for c in combinations(range(n), k))


def format_set(mask: int) -> str:
    return "{" + ",".join(map(str, elements_of(mask))) + "}"


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KFamily:
    """A k-uniform family over [n]; ``members`` is strictly increasing."""

    n: int
    k: int
    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_N:
            raise InvalidInputError(f"ground set size {self.n} outside 1..{MAX_N}")
        if not 0 <= self.k <= self.n:
            raise InvalidInputError(f"uniformity k={self.k} not in 0..n={self.n}")
        prev = -1
        for m in self.members:
            check_mask(m, self.n)
            if popcount(m) != self.k:
                raise InvalidInputError(
                    f"member {format_set(m)} has size {popcount(m)}, expected k={self.k}")
            if m == prev:
                raise InvalidInputError(f"duplicate member {format_set(m)}")
            if m < prev:
                raise InvalidInputError("members are not sorted")
            prev = m

    @classmethod
    def from_masks(cls, n: int, k: int, masks: Iterable[int]) -> KFamily:
        """Build a family from masks in any order; duplicates are rejected."""
        ms = list(masks)
        if len(set(ms)) != len(ms):
            raise InvalidInputError("duplicate member")
        return cls(n, k, tuple(sorted(ms)))

    @classmethod
    def from_sets(cls, n: int, k: int, sets: Iterable[Iterable[int]]) -> KFamily:
        return cls.from_masks(n, k, (mask_of(s) for s in sets))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask: object) -> bool:
        return mask in self.members

    def as_lists(self) -> list[list[int]]:
        return [elements_of(m) for m in self.members]

    def __str__(self) -> str:
        return "{" + ", ".join(format_set(m) for m in self.members) + "}"


# --------------------------------------------------------------------------
# traces and chains
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Trace:
    x: int
    patterns: frozenset[int]

    def __post_init__(self) -> None:
        for p in self.patterns:
            if p & ~self.x:
                raise InvalidInputError(
                    f"pattern {format_set(p)} is not a subset of {format_set(self.x)}")


@dataclass(frozen=True)
class ChainWitness:
    """A chain in the trace on ``x`` together with one realizing member per level."""

    x: int
    levels: tuple[int, ...]
    realizers: tuple[int, ...]

    def verify(self, fam: KFamily) -> bool:
        if len(self.levels) != len(self.realizers) or not self.levels:
            return False
        if self.levels[-1] != self.x:
            return False
        for lo, hi in zip(self.levels, self.levels[1:]):
            if lo & ~hi or popcount(hi) != popcount(lo) + 1:
                return False
        return all(m in fam and m & self.x == lvl
                   for lvl, m in zip(self.levels, self.realizers))


def trace(fam: KFamily, x: int) -> Trace:
    check_mask(x, fam.n)
    return Trace(x, frozenset(m & x for m in fam.members))


def _check_trace(tr: Trace, r: int) -> None:
    if r < 1:
        raise InvalidInputError("r must be at least 1")
    if popcount(tr.x) != r:
        raise InvalidInputError(f"|x| = {popcount(tr.x)} but r = {r}")


def _chain_levels(patterns: frozenset[int], x: int, r: int, start: int) -> list[set[int]]:
    """Forward reachability: levels[i] holds the reachable size-(start+i) patterns."""
    if start == 0:
        level = {0} if 0 in patterns else set()
    else:
        level = {p for p in patterns if popcount(p) == 1}
    levels = [level]
    by_size: dict[int, list[int]] = {}
    for p in patterns:
        by_size.setdefault(popcount(p), []).append(p)
    for size in range(start + 1, r + 1):
        prev = levels[-1]
        level = {p for p in by_size.get(size, ())
                 if any(p ^ b in prev for b in iter_bits(p))}
        levels.append(level)
    return levels


def has_maximal_chain(tr: Trace, r: int) -> bool:
    """True iff the trace contains empty set < Y_1 < ... < Y_r = x with |Y_i| = i."""
    _check_trace(tr, r)
    return tr.x in _chain_levels(tr.patterns, tr.x, r, 0)[-1]


def has_almost_maximal_chain(tr: Trace, r: int) -> bool:
    """Like :func:`has_maximal_chain` with the empty level dropped."""
    _check_trace(tr, r)
    return tr.x in _chain_levels(tr.patterns, tr.x, r, 1)[-1]


def brute_force_has_chain(tr: Trace, r: int, mode: str = MAXIMAL) -> bool:
    """Test oracle: try every ordering of the elements of x explicitly."""
    _check_trace(tr, r)
    if mode == MAXIMAL and 0 not in tr.patterns:
        return False
    for order in _orderings(tr.x):
        acc = 0
        for b in order:
            acc |= b
            if acc not in tr.patterns:
                break
        else:
            return True
    return False


def _orderings(x: int) -> Iterator[tuple[int, ...]]:
    from itertools import permutations
    return permutations(list(iter_bits(x)))


# --------------------------------------------------------------------------
# admissibility
# --------------------------------------------------------------------------

def _candidate_tops(fam: KFamily, r: int, mode: str) -> Iterable[int]:
    """r-sets that could carry a chain; a superset of the ones that do.

    The top level needs a member A containing x. In maximal mode the empty
    level needs a member B missing x entirely, so x lies in A minus B. In
    almost mode some B meets x in one point e, so x - {e} lies in A minus B.
    """
    n, members = fam.n, fam.members
    need = r if mode == MAXIMAL else r - 1
    pairs = []
    work = 0
    for a in members:
        for b in members:
            free = a & ~b
            size = popcount(free)
            if size < need:
                continue
            pairs.append((a & b, free))
            if mode == MAXIMAL:
                work += comb(size, r)
            else:
                work += popcount(a & b) * comb(size, r - 1)
    if work >= comb(n, r):
        return k_subsets(n, r)
    tops: set[int] = set()
    for common, free in pairs:
        bits = list(iter_bits(free))
        if mode == MAXIMAL:
            for c in combinations(bits, r):
                tops.add(sum(c))
        else:
            for e in iter_bits(common):
                for c in combinations(bits, r - 1):
                    tops.add(sum(c) | e)
    return sorted(tops)


def _check_r(fam: KFamily, r: int, lowest: int) -> None:
    if r < lowest:
        raise InvalidInputError(f"r must be at least {lowest}")
    if r > fam.n:
        raise InvalidInputError(f"r={r} exceeds n={fam.n}")


def _admissible(fam: KFamily, r: int, mode: str) -> bool:
    has = has_maximal_chain if mode == MAXIMAL else has_almost_maximal_chain
    return not any(has(trace(fam, x), r) for x in _candidate_tops(fam, r, mode))


def is_w_admissible(fam: KFamily, r: int) -> bool:
    """No r-subset's trace contains a maximal chain."""
    _check_r(fam, r, 1)
    return _admissible(fam, r, MAXIMAL)


def is_u_admissible(fam: KFamily, r: int) -> bool:
    """No r-subset's trace contains an almost maximal chain."""
    _check_r(fam, r, 2)
    return _admissible(fam, r, ALMOST)


def is_admissible(fam: KFamily, r: int, mode: str) -> bool:
    return is_w_admissible(fam, r) if mode == MAXIMAL else is_u_admissible(fam, r)


def find_chain_witness(fam: KFamily, r: int, mode: str = MAXIMAL) -> ChainWitness | None:
    """Deterministic chain witness, or ``None`` when the family is admissible.

    Picks the smallest x, then the lexicographically smallest chain, then the
    smallest realizer of each level.
    """
    _check_r(fam, r, 1 if mode == MAXIMAL else 2)
    start = 0 if mode == MAXIMAL else 1
    for x in k_subsets(fam.n, r):
        tr = trace(fam, x)
        forward = _chain_levels(tr.patterns, x, r, start)
        if x not in forward[-1]:
            continue
        # keep only patterns that also lead up to x
        alive = [set() for _ in forward]
        alive[-1] = {x}
        for i in range(len(forward) - 2, -1, -1):
            alive[i] = {p for p in forward[i] if any(p | b in alive[i + 1]
                                                    for b in iter_bits(x & ~p))}
        levels = [min(alive[0])]
        for i in range(1, len(alive)):
            levels.append(min(p for p in alive[i] if levels[-1] & ~p == 0))
        realizers = [min(m for m in fam.members if m & x == lvl) for lvl in levels]
        return ChainWitness(x, tuple(levels), tuple(realizers))
    return None


# --------------------------------------------------------------------------
# constructions and small utilities
# --------------------------------------------------------------------------

def star_family(n: int, k: int, r: int) -> KFamily:
    """All k-subsets of [n] containing {1, ..., k-r+1}."""
    if not 1 <= r <= k:
        raise InvalidInputError(f"star needs 1 <= r <= k, got r={r}, k={k}")
    if k > n:
        raise InvalidInputError(f"k={k} exceeds n={n}")
    core = (1 << (k - r + 1)) - 1
    return KFamily(n, k, tuple(m for m in k_subsets(n, k) if m & core == core))


def small_ground_family(n: int, k: int, r: int) -> KFamily:
    """All k-subsets of {1, ..., k+r-1}."""
    if r < 1:
        raise InvalidInputError("r must be at least 1")
    if n < k + r - 1:
        raise InvalidInputError(f"n={n} is smaller than k+r-1={k + r - 1}")
    return KFamily(n, k, tuple(k_subsets(k + r - 1, k)))


def w_formula(n: int, k: int, r: int) -> int:
    """C(n-k+r-1, r-1)."""
    if r < 1 or k < r - 1 or n < k:
        raise InvalidInputError(f"formula needs n >= k >= r-1 >= 0, got {(n, k, r)}")
    return comb(n - k + r - 1, r - 1)


def min_pairwise_intersection(fam: KFamily) -> int:
    if len(fam) < 2:
        raise InvalidInputError("need at least two members")
    return min(popcount(a & b) for a, b in combinations(fam.members, 2))


def is_intersecting(fam: KFamily) -> bool:
    return min_pairwise_intersection(fam) >= 1


def apply_perm(mask: int, perm: Sequence[int]) -> int:
    """Image of ``mask`` under a 1-based permutation given as ``perm[i-1] = image of i``."""
    out = 0
    for i, img in enumerate(perm):
        if mask >> i & 1:
            out |= 1 << (img - 1)
    return out


def relabel(fam: KFamily, perm: Sequence[int]) -> KFamily:
    """Apply ``perm`` (a tuple with ``perm[i-1]`` the image of element i)."""
    if sorted(perm) != list(range(1, fam.n + 1)):
        raise InvalidInputError(f"not a permutation of [{fam.n}]: {list(perm)}")
    return KFamily.from_masks(fam.n, fam.k, (apply_perm(m, perm) for m in fam.members))
