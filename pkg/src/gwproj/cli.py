"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .detlab import verify_det, verify_lemma, verify_vw
from .kernel import format_rat
from .linalg import SingularSystemError
from .store import Cache, CacheConflict, CacheParseError, InvKey, cache_load, cache_save
from .tables import DESK_BOUNDS, LAYOUTS, evaluate_parallel, records, render_plain
from .virasoro import AssemblyError, Engine

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def parse_insertions(tokens, r: int) -> tuple:
    """``m:a`` tokens, ``pt`` for ``0:r``; a ``^k`` suffix repeats a token."""
    out = []
    for tok in tokens:
        for piece in tok.replace(",", " ").split():
            base, _, power = piece.partition("^")
            try:
                count = int(power) if power else 1
            except ValueError:
                raise UsageError(f"bad repeat count in {piece!r}") from None
            if count < 0:
                raise UsageError(f"negative repeat count in {piece!r}")
            if base == "pt":
                ins = (0, r)
            else:
                m, sep, a = base.partition(":")
                try:
                    if not sep:
                        raise ValueError
                    ins = (int(m), int(a))
                except ValueError:
                    raise UsageError(f"bad insertion token {piece!r} (expected m:a or pt^k)") from None
            if ins[0] < 0:
                raise UsageError(f"descendant index must be non-negative in {piece!r}")
            if not 0 <= ins[1] <= r:
                raise UsageError(f"class index out of range 0..{r} in {piece!r}")
            out.extend([ins] * count)
    return tuple(out)


def _load_cache(path) -> Cache:
    if path and Path(path).exists():
        return cache_load(path)
    return Cache()


def _engines_from(args, rs) -> dict:
    cache = _load_cache(args.cache)
    engines = {}
    for r in rs:
        sub = Cache()
        for table in (cache.inv, cache.aux):
            for k, v in table.items():
                if k.r == r:
                    sub.put(k, v)
        engines[r] = Engine(r, sub, reductions=not args.no_reductions)
    return engines


def _save_engines(args, engines: dict) -> None:
    if not args.cache:
        return
    total = Cache()
    for eng in engines.values():
        total.merge(eng.cache)
    cache_save(total, args.cache)


def _report_stats(args, engines: dict) -> None:
    if args.stats:
        solves = sum(e.stats.family_solves for e in engines.values())
        print(f"family solves: {solves}", file=sys.stderr)


def cmd_compute(args) -> int:
    if args.r < 1:
        raise UsageError("r must be at least 1")
    if args.g < 0:
        raise UsageError("genus must be non-negative")
    ins = parse_insertions(args.ins, args.r)
    engines = _engines_from(args, [args.r])
    eng = engines[args.r]
    value = eng.invariant(args.g, args.d, ins)
    if args.json:
        key = InvKey(args.r, args.g, args.d, ins)
        payload = {
            "key": {"r": args.r, "g": args.g, "d": args.d,
                    "insertions": [f"{m}:{a}" for m, a in key.insertions]},
            "value": format_rat(value),
        }
        print(json.dumps(payload))
    else:
        print(format_rat(value))
    _save_engines(args, engines)
    _report_stats(args, engines)
    return EXIT_OK


def cmd_table(args) -> int:
    dmax_default, gmax_default = DESK_BOUNDS[args.name]
    dmax = dmax_default if args.dmax is None else args.dmax
    gmax = gmax_default if args.gmax is None else args.gmax
    if dmax < 0 or gmax < 0:
        raise UsageError("bounds must be non-negative")
    if (dmax > dmax_default or gmax > gmax_default) and not args.big:
        raise UsageError(f"bounds beyond d<={dmax_default}, g<={gmax_default} need --big")
    cells = LAYOUTS[args.name](dmax, gmax)
    engines = _engines_from(args, sorted({c.r for c in cells}))
    values = evaluate_parallel(cells, engines, args.jobs)
    if args.format == "plain":
        print(render_plain(cells, values))
    elif args.format == "json":
        print(json.dumps(records(cells, values), indent=1))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["r", "g", "d", "insertions", "value"])
        for rec in records(cells, values):
            ins = "" if rec["insertions"] is None else " ".join(rec["insertions"])
            writer.writerow([rec["r"], rec["g"], rec["d"], ins, rec["value"] or "-"])
        sys.stdout.write(buf.getvalue())
    _save_engines(args, engines)
    _report_stats(args, engines)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite == "lemma":
        report = verify_lemma(args.trials, args.seed)
    elif args.suite == "det":
        if args.N < 1:
            raise UsageError("N must be at least 1")
        report = verify_det(args.r, args.N, args.trials, args.seed, genera=tuple(args.genus))
    else:
        if args.N < 1:
            raise UsageError("N must be at least 1")
        report = verify_vw(args.r, args.N, genera=tuple(args.genus), seed=args.seed)
    print(report.text())
    return EXIT_OK if report.ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwproj",
        description="Exact Gromov-Witten invariants of projective spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", help="cache file to read and update")
    common.add_argument("--stats", action="store_true", help="report family solves on stderr")
    common.add_argument("--no-reductions", action="store_true",
                        help="skip string/dilaton/divisor shortcuts in genus >= 1")

    p = sub.add_parser("compute", parents=[common], help="one invariant")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--ins", nargs="+", required=True, metavar="TOKEN",
                   help="insertions as m:a (tau_m of the codimension-a class) or pt^k")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("table", parents=[common], help="reference tables")
    p.add_argument("name", choices=sorted(LAYOUTS))
    p.add_argument("--dmax", type=int)
    p.add_argument("--gmax", type=int)
    p.add_argument("--format", choices=["plain", "csv", "json"], default="plain")
    p.add_argument("--big", action="store_true", help="allow bounds beyond the desk defaults")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="determinant and lemma checks")
    p.add_argument("suite", choices=["det", "lemma", "vw"])
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--genus", type=int, nargs="+", default=[1, 2])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CacheParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularSystemError, AssemblyError, CacheConflict) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
