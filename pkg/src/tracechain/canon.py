"""Canonical labeling of uniform families.

The canonical form is the relabeling whose sorted member masks form the
lexicographically least sequence. New labels are handed out from 1 upward;
once labels 1..j are placed, the members lying inside the placed elements are
exactly the first entries of the final sorted sequence, which gives a sound
prefix bound. Elements interchangeable by a transposition automorphism are
tried once per class.
"""

from __future__ import annotations

from dataclasses import dataclass

from .setfam import InvalidInputError, KFamily, apply_perm

CANON_MAX_N = 10


class UnsupportedError(InvalidInputError):
    """Instance exceeds the size the exhaustive canonicalizer accepts."""


@dataclass(frozen=True)
class CanonicalFamily:
    family: KFamily
    certificate: tuple[int, ...]  # certificate[i-1] is the new label of element i


def _swap(mask: int, u: int, v: int) -> int:
    bu, bv = mask >> u & 1, mask >> v & 1
    if bu != bv:
        mask ^= (1 << u) | (1 << v)
    return mask


def transposition_classes(fam: KFamily) -> list[int]:
    """``cls[e]`` is the least element e' such that swapping e and e' fixes ``fam``."""
    members = set(fam.members)
    cls = list(range(fam.n))
    for v in range(fam.n):
        for u in range(v):
            if cls[u] != u:
                continue
            if all(_swap(m, u, v) in members for m in fam.members):
                cls[v] = u
                break
    return cls


def canonical_form(fam: KFamily) -> CanonicalFamily:
    n = fam.n
    if n > CANON_MAX_N:
        raise UnsupportedError(f"canonical form supports n <= {CANON_MAX_N}, got n={n}")
    members = fam.members
    m = len(members)
    cls = transposition_classes(fam)

    best_seq: list[int] | None = None
    best_perm: list[int] | None = None
    perm = [0] * n  # perm[e] = new 0-based label of element e
    # members still waiting for some of their elements to be placed
    remaining_count = [bin(a).count("1") for a in members]
    # for each element, indices of members containing it
    holders = [[i for i, a in enumerate(members) if a >> e & 1] for e in range(n)]

    def images(idx: list[int]) -> list[int]:
        out = []
        for i in idx:
            img = 0
            for e in range(n):
                if members[i] >> e & 1:
                    img |= 1 << perm[e]
            out.append(img)
        return out

    def search(depth: int, placed: int, prefix: list[int]) -> None:
        nonlocal best_seq, best_perm
        if depth == n:
            if best_seq is None or prefix < best_seq:
                best_seq = list(prefix)
                best_perm = list(perm)
            return
        options = []
        tried = set()
        for e in range(n):
            if placed >> e & 1 or cls[e] in tried:
                continue
            tried.add(cls[e])
            perm[e] = depth
            done = []
            for i in holders[e]:
                remaining_count[i] -= 1
                if remaining_count[i] == 0:
                    done.append(i)
            new = sorted(prefix + images(done))
            for i in holders[e]:
                remaining_count[i] += 1
            options.append((new, e))
        options.sort()
        for new, e in options:
            if best_seq is not None:
                length = len(new)
                head = best_seq[:length]
                if new > head:
                    continue
                if new == head and length < m and best_seq[length] < 1 << (depth + 1):
                    continue
            perm[e] = depth
            for i in holders[e]:
                remaining_count[i] -= 1
            search(depth + 1, placed | 1 << e, new)
            for i in holders[e]:
                remaining_count[i] += 1

    search(0, 0, [])
    assert best_perm is not None
    cert = tuple(p + 1 for p in best_perm)
    canon = KFamily.from_masks(n, fam.k, (apply_perm(a, cert) for a in members))
    return CanonicalFamily(canon, cert)


def is_isomorphic(a: KFamily, b: KFamily) -> bool:
    if (a.n, a.k, len(a)) != (b.n, b.k, len(b)):
        return False
    return canonical_form(a).family == canonical_form(b).family
