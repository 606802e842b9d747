"""Persistent value cache keyed by ``"mode:n:k:r"``."""

from __future__ import annotations

import json
import os
from pathlib import Path

from .setfam import KFamily, mask_of

CACHE_ENV = "TRACECHAIN_CACHE"


class ValueCache:
    """JSON document mapping ``"W:7:3:3"`` to ``{optimum, status, witness}``.

    Entries that are not proven optimal are kept for reference but never
    served back as exact values.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path else None
        self.entries: dict[str, dict] = {}
        if self.path is not None and self.path.exists():
            self.entries = json.loads(self.path.read_text() or "{}")

    @staticmethod
    def key(mode: str, n: int, k: int, r: int) -> str:
        return f"{mode}:{n}:{k}:{r}"

    def lookup(self, mode: str, n: int, k: int, r: int):
        from .engine import OPTIMAL, SearchResult

        e = self.entries.get(self.key(mode, n, k, r))
        if e is None or e.get("status") != OPTIMAL:
            return None
        fam = KFamily.from_masks(n, k, (mask_of(s) for s in e["witness"]))
        return SearchResult(mode, n, k, r, e["optimum"], OPTIMAL, fam)

    def store(self, res) -> None:
        key = self.key(res.mode, res.n, res.k, res.r)
        old = self.entries.get(key)
        if old is not None and old.get("status") == "optimal" and not res.optimal:
            return
        self.entries[key] = {
            "optimum": res.optimum,
            "status": res.status,
            "witness": res.witness.as_lists(),
        }
        self.save()

    def save(self) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.entries, indent=1, sort_keys=True) + "\n")
        tmp.replace(self.path)

    def __len__(self) -> int:
        return len(self.entries)


def resolve_cache(path: str | None) -> ValueCache | None:
    """Flag path first, then the environment variable, else no cache."""
    path = path or os.environ.get(CACHE_ENV)
    return ValueCache(path) if path else None
