"""Command-line front end.

Exit codes: 0 success or claim pass, 1 claim fail or inadmissible family,
2 usage error, 3 resource limit hit (result unknown).
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import engine
from .cache import resolve_cache
from .canon import canonical_form
from .engine import SearchIncomplete, SearchOptions
from .formats import (
    parse_family_file,
    render_reports,
    render_table,
    render_witness,
    write_family_text,
)
from .model import export_linear_model
from .setfam import (
    ALMOST,
    MAXIMAL,
    InvalidInputError,
    KFamily,
    find_chain_witness,
    format_set,
    is_admissible,
    k_subsets,
    small_ground_family,
    star_family,
)
from .verify import CLAIMS, ERROR, FAIL, TABLE_FIELDS, UNKNOWN, build_value_table, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--cache", help="value cache path (overrides $TRACECHAIN_CACHE)")


def _nkr(p: argparse.ArgumentParser, required: bool = True, kind=int) -> None:
    for name in ("n", "k", "r"):
        p.add_argument(f"--{name}", type=kind, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tracechain",
                                     description="Exact search for trace-chain extremal families.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("w", "compute W(n,k,r)"), ("u", "compute U(n,k,r)")):
        p = sub.add_parser(name, help=help_)
        _nkr(p)
        p.add_argument("--no-symmetry", action="store_true")
        _common(p)

    for name, help_ in (("check", "test a family for admissibility"),
                        ("witness", "print a chain witness if one exists")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--r", type=int, required=True)
        p.add_argument("--family", required=True)
        p.add_argument("--mode", choices=("W", "U"), default="W")
        _common(p)

    p = sub.add_parser("extremal", help="list extremal families up to relabeling")
    _nkr(p)
    p.add_argument("--mode", choices=("W", "U"), default="W")
    _common(p)

    p = sub.add_parser("canon", help="canonical form of a family")
    p.add_argument("--family", required=True)
    _common(p)

    p = sub.add_parser("construct", help="print a construction as a family file")
    _nkr(p)
    p.add_argument("--kind", choices=("best", "star", "small", "random"), default="best")
    p.add_argument("--mode", choices=("W", "U"), default="W")
    _common(p)

    p = sub.add_parser("export-model", help="print the binary program in LP format")
    _nkr(p)
    p.add_argument("--mode", choices=("W", "U"), default="W")
    _common(p)

    p = sub.add_parser("verify", help="run a claim suite")
    p.add_argument("--suite", required=True, type=str.upper, choices=CLAIMS)
    _nkr(p, required=False)
    _common(p)

    p = sub.add_parser("table", help="value table over a grid (ranges like 3..8 or 3,5)")
    _nkr(p, required=True, kind=str)
    p.add_argument("--mode", choices=("W", "U"), default="W")
    _common(p)
    return parser


def _options(args, mode: str = engine.W) -> SearchOptions:
    return SearchOptions(mode=mode,
                         symmetry_break=not getattr(args, "no_symmetry", False),
                         thread_count=args.threads,
                         node_limit=args.node_limit,
                         time_limit=args.time_limit)


def _read_family(path: str) -> KFamily:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_family_file(text)


def _values(spec: str) -> list[int]:
    out: list[int] = []
    for part in spec.split(","):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _cmd_value(args, out) -> int:
    mode = engine.W if args.command == "w" else engine.U
    res = engine.compute(args.n, args.k, args.r, _options(args, mode), resolve_cache(args.cache))
    if args.format == "records":
        out.write(f"mode={mode} n={args.n} k={args.k} r={args.r} optimum={res.optimum} "
                  f"status={res.status} nodes={res.nodes_explored} "
                  f"witness=\"{res.witness}\"\n")
    elif res.optimal:
        out.write(f"{res.optimum}\nwitness: {res.witness}\n")
    else:
        out.write(f"{res.optimum} UNKNOWN (lower bound only, limit reached)\n"
                  f"witness: {res.witness}\n")
    return EXIT_OK if res.optimal else EXIT_LIMIT


def _cmd_check(args, out) -> int:
    fam = _read_family(args.family)
    chain = MAXIMAL if args.mode == "W" else ALMOST
    wit = find_chain_witness(fam, args.r, chain)
    if args.format == "records":
        if wit is None:
            out.write("admissible=true\n")
        else:
            out.write(f"admissible=false x={format_set(wit.x)} "
                      f"levels={'<'.join(format_set(l) for l in wit.levels)} "
                      f"realizers={';'.join(format_set(m) for m in wit.realizers)}\n")
    elif args.command == "check":
        out.write("admissible\n" if wit is None else "inadmissible\n" + render_witness(wit) + "\n")
    else:
        out.write("none\n" if wit is None else render_witness(wit) + "\n")
    if args.command == "witness":
        return EXIT_OK
    return EXIT_OK if wit is None else EXIT_FAIL


def _cmd_extremal(args, out) -> int:
    try:
        classes = engine.enumerate_extremal(args.n, args.k, args.r, args.mode,
                                            _options(args, args.mode))
        code = EXIT_OK
    except SearchIncomplete as exc:
        classes, code = exc.partial, EXIT_LIMIT
    if args.format == "records":
        for i, c in enumerate(classes):
            out.write(f"class={i} size={len(c.family)} family=\"{c.family}\"\n")
    else:
        out.write(f"classes: {len(classes)}" + (" UNKNOWN (incomplete)" if code else "") + "\n")
        for c in classes:
            out.write(f"{c.family}\n")
    return code


def _cmd_canon(args, out) -> int:
    c = canonical_form(_read_family(args.family))
    out.write(write_family_text(c.family))
    out.write("# certificate: " + " ".join(map(str, c.certificate)) + "\n")
    return EXIT_OK


def _random_family(n: int, k: int, r: int, mode: str, seed: int | None) -> KFamily:
    """Greedy maximal admissible family in a seeded random order."""
    rng = random.Random(seed)
    order = k_subsets(n, k)
    rng.shuffle(order)
    chain = MAXIMAL if mode == "W" else ALMOST
    chosen: list[int] = []
    for m in order:
        if is_admissible(KFamily.from_masks(n, k, chosen + [m]), r, chain):
            chosen.append(m)
    return KFamily.from_masks(n, k, chosen)


def _cmd_construct(args, out) -> int:
    n, k, r = args.n, args.k, args.r
    if args.kind == "star":
        fam = star_family(n, k, r)
    elif args.kind == "small":
        fam = small_ground_family(n, k, r)
    elif args.kind == "random":
        fam = _random_family(n, k, r, args.mode, args.seed)
    else:
        fam = engine.lower_bound_construction(n, k, r)
    out.write(write_family_text(fam))
    return EXIT_OK


def _cmd_export(args, out) -> int:
    out.write(export_linear_model(args.n, args.k, args.r, args.mode).to_lp())
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    reports = run_suite(args.suite, args.n, args.k, args.r, _options(args),
                        resolve_cache(args.cache))
    out.write(render_reports(reports, args.format))
    statuses = {rep.status for rep in reports}
    if statuses & {FAIL, ERROR}:
        return EXIT_FAIL
    if UNKNOWN in statuses:
        return EXIT_LIMIT
    return EXIT_OK


def _cmd_table(args, out) -> int:
    lowest = 1 if args.mode == "W" else 2
    grid = [(n, k, r) for n in _values(args.n) for k in _values(args.k) for r in _values(args.r)
            if 1 <= n and 0 <= k <= n and lowest <= r <= n]
    rows = build_value_table(grid, args.mode, _options(args, args.mode),
                             resolve_cache(args.cache))
    out.write(render_table(rows, TABLE_FIELDS, args.format))
    return EXIT_OK if all(row["status"] == engine.OPTIMAL for row in rows) else EXIT_LIMIT


COMMANDS = {
    "w": _cmd_value, "u": _cmd_value, "check": _cmd_check, "witness": _cmd_check,
    "extremal": _cmd_extremal, "canon": _cmd_canon, "construct": _cmd_construct,
    "export-model": _cmd_export, "verify": _cmd_verify, "table": _cmd_table,
}


def run_command(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except (InvalidInputError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_command())
