"""Family files and report/table rendering."""

from __future__ import annotations

import json

from .setfam import InvalidInputError, KFamily, format_set, mask_of


class FamilyFormatError(InvalidInputError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _ints(tokens: list[str], line: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FamilyFormatError(line, f"expected integers, got {' '.join(tokens)!r}") from None


def _build(n: int, k: int, rows: list[tuple[int, list[int]]], header_line: int = 1) -> KFamily:
    if not 1 <= n <= 32:
        raise FamilyFormatError(header_line, f"n={n} outside 1..32")
    if not 0 <= k <= n:
        raise FamilyFormatError(header_line, f"k={k} not in 0..n")
    seen: dict[int, int] = {}
    for line, elems in rows:
        for e in elems:
            if not 1 <= e <= n:
                raise FamilyFormatError(line, f"element {e} outside 1..{n}")
        if len(set(elems)) != len(elems):
            raise FamilyFormatError(line, "repeated element within a member")
        if len(elems) != k:
            raise FamilyFormatError(line, f"member size {len(elems)} != k={k}")
        m = mask_of(elems)
        if m in seen:
            raise FamilyFormatError(line, f"duplicate member (first on line {seen[m]})")
        seen[m] = line
    return KFamily(n, k, tuple(sorted(seen)))


def parse_family_text(text: str) -> KFamily:
    """First line ``n k``; every further nonblank line lists one member's elements."""
    lines = text.replace("\r\n", "\n").split("\n")
    header = None
    rows = []
    for no, raw in enumerate(lines, start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        toks = s.split()
        if header is None:
            if len(toks) != 2:
                raise FamilyFormatError(no, "header must be 'n k'")
            header = (no, *_ints(toks, no))
            continue
        rows.append((no, _ints(toks, no)))
    if header is None:
        raise FamilyFormatError(1, "missing header 'n k'")
    line, n, k = header
    return _build(n, k, rows, line)


def parse_family_json(text: str) -> KFamily:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(exc.lineno, exc.msg) from None
    if not isinstance(doc, dict) or not {"n", "k", "sets"} <= doc.keys():
        raise FamilyFormatError(1, "structured family needs keys n, k, sets")
    rows = []
    for i, s in enumerate(doc["sets"]):
        if not isinstance(s, list) or not all(isinstance(e, int) for e in s):
            raise FamilyFormatError(1, f"sets[{i}] is not a list of integers")
        rows.append((1, s))
    return _build(doc["n"], doc["k"], rows)


def parse_family_file(document: str) -> KFamily:
    """Parse either format; a leading ``{`` selects the structured one."""
    if document.lstrip().startswith("{"):
        return parse_family_json(document)
    return parse_family_text(document)


def write_family_text(fam: KFamily) -> str:
    out = [f"{fam.n} {fam.k}"]
    out.extend(" ".join(map(str, s)) for s in fam.as_lists())
    return "\n".join(out) + "\n"


def write_family_json(fam: KFamily) -> str:
    return json.dumps({"n": fam.n, "k": fam.k, "sets": fam.as_lists()})


# --------------------------------------------------------------------------
# reports and tables
# --------------------------------------------------------------------------

REPORT_FIELDS = ("claim", "n", "k", "r", "mode", "status", "computed", "expected", "witness")


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    return str(v)


def _record(pairs) -> str:
    parts = []
    for key, v in pairs:
        s = _cell(v)
        if any(c.isspace() for c in s) or '"' in s:
            s = json.dumps(s)
        parts.append(f"{key}={s}")
    return " ".join(parts)


def _table(header, rows) -> str:
    cells = [list(header)] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    out = []
    for i, row in enumerate(cells):
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if i == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def render_reports(reports, fmt: str = "text") -> str:
    rows = [[getattr(rep, f) for f in REPORT_FIELDS] for rep in reports]
    if fmt == "records":
        return "".join(_record(zip(REPORT_FIELDS, row)) + "\n" for row in rows)
    return _table(REPORT_FIELDS, rows)


def render_table(rows: list[dict], fields, fmt: str = "text") -> str:
    if fmt == "records":
        return "".join(_record((f, row[f]) for f in fields) + "\n" for row in rows)
    return _table(fields, [[row[f] for f in fields] for row in rows])


def render_witness(w) -> str:
    levels = " < ".join(format_set(l) for l in w.levels)
    real = ", ".join(format_set(m) for m in w.realizers)
    return f"x={format_set(w.x)} chain: {levels} realizers: {real}"
