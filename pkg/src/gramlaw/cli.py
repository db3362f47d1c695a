"""Command-line front end: ``gramlaw <command> ...``.

Each subcommand calls one library operation and serialises its result.
Exit codes: 0 success, 1 usage error, 2 certification or coverage failure,
3 numeric convergence failure, 4 a checked inequality failed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import pipeline, stats
from .errors import (CertificationError, ConvergenceError, CoverageError, DomainError,
                     TableFormatError, UnresolvedBlockError)
from .gram import from_classical, gram_heights, to_classical
from .sequences import GramLawSequences, records_to_csv, s_sawtooth, sawtooth_to_csv
from .serialize import dumps
from .zeros import compute_table, ingest_table, load_table, save_table

EXIT_OK, EXIT_USAGE, EXIT_CERT, EXIT_NUMERIC, EXIT_FAILED = 0, 1, 2, 3, 4
DEFAULT_MAX_ZEROS = 100_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_window(text: str) -> tuple[int, int | None]:
    """'N:M' -> (N, M); a bare 'N' leaves M to a preset."""
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return int(a), int(b)
        return int(text), None
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window {text!r}, expected N:M") from None


def _resolve_window(args) -> tuple[int, int]:
    start, length = args.window
    if args.preset == "paper":
        length = stats.Window.paper_preset(start, args.eps).length
    if length is None:
        raise UsageError("window length missing: use N:M or --preset paper")
    if start < 0 or length < 1:
        raise UsageError("window must have N >= 0 and M >= 1")
    return start, length


def _table(args, start, length):
    if args.table:
        return load_table(args.table)
    return pipeline.table_for_window(start, length, threads=args.threads)


def _sequences(args):
    start, length = _resolve_window(args)
    return GramLawSequences(_table(args, start, length)), start, length


def _window_data(args):
    seqs, start, length = _sequences(args)
    return stats.window_data(seqs, stats.Window(start, length), args.eps)


def _emit(args, text: str):
    if getattr(args, "out", None):
        path = Path(args.out)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ subcommands


def cmd_zeros(args):
    if args.ingest:
        table = ingest_table(args.ingest, offset=args.offset,
                             first_index=args.first_index or 1)
    else:
        if args.upto_index is not None:
            first, count = 1, args.upto_index
        elif args.count is not None:
            first, count = args.first_index or 1, args.count
        else:
            raise UsageError("give --upto-index, --count or --ingest")
        if count < 1 or first < 1:
            raise UsageError("index range must be positive")
        if count > args.max_zeros:
            raise UsageError(f"range too large: {count} zeros exceeds --max-zeros {args.max_zeros}")
        table = compute_table(first, count, threads=args.threads)
    if args.out:
        path = save_table(table, args.out)
    else:
        root = pipeline.cache_dir()
        root.mkdir(parents=True, exist_ok=True)
        path = save_table(table, pipeline.cache_path(table.first_index, table.last_index, root))
    summary = {
        "first_index": table.first_index,
        "last_index": table.last_index,
        "count": len(table),
        "source": table.source,
        "precision": table.precision,
        "certified": table.certified,
        "path": str(path),
    }
    sys.stdout.write(dumps(summary))
    return EXIT_OK


def cmd_gram(args):
    first = from_classical(args.index) if args.classical else args.index
    if first < 0 or args.count < 1:
        raise UsageError("need a non-negative index and --count >= 1")
    heights = gram_heights(first, args.count)
    label = to_classical if args.classical else (lambda n: n)
    lines = ["m\tg" if args.classical else "n\tt"]
    lines += [f"{label(first + i)}\t{t:.17g}" for i, t in enumerate(heights)]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_seq(args):
    seqs, start, length = _sequences(args)
    records = seqs.records(start, length)
    if args.format == "json":
        _emit(args, dumps(records))
    else:
        _emit(args, records_to_csv(records))
    return EXIT_OK


def _moment_exponent(args):
    chosen = [x is not None for x in (args.even_k, args.odd_k, args.abs)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --even-k, --odd-k, --abs")
    if args.even_k is not None:
        return 2 * args.even_k, True
    if args.odd_k is not None:
        return 2 * args.odd_k - 1, True
    return args.abs, False


def cmd_stats(args):
    if args.stat == "lemma2" and args.a >= args.b:
        raise UsageError("need --a < --b")
    data = _window_data(args)
    code = EXIT_OK
    if args.stat == "moments":
        exponent, signed = _moment_exponent(args)
        out = dumps(stats.moment(data, args.quantity, exponent, signed))
    elif args.stat == "cdf":
        report = stats.cdf_report(data, args.quantity, args.lo, args.hi, args.step)
        if args.format == "csv":
            rows = ["x,empirical,phi"]
            rows += [f"{x:.17g},{e:.17g},{p:.17g}" for x, e, p in report.grid]
            out = "\n".join(rows) + "\n"
        else:
            out = dumps(report)
    elif args.stat == "counts":
        out = dumps({"window": {"start": data.window.start, "length": data.window.length},
                     "a": args.a, "b": args.b,
                     "e": stats.count_e(data, args.a, args.b),
                     "f": stats.count_f(data, args.a, args.b)})
    elif args.stat == "lemma2":
        checks = stats.lemma2_sweep(data, args.a, args.b)
        rows = ["a\tb\te\tf\tresidual\tbound\tresult"]
        rows += [f"{c.a}\t{c.b}\t{c.e}\t{c.f}\t{c.residual}\t{c.bound}\t"
                 f"{'PASS' if c.passed else 'FAIL'}" for c in checks]
        failed = sum(not c.passed for c in checks)
        rows.append(f"# {len(checks) - failed}/{len(checks)} pass")
        out = "\n".join(rows) + "\n"
        code = EXIT_OK if failed == 0 else EXIT_FAILED
    elif args.stat == "extremes":
        out = dumps(stats.extremes(data))
    elif args.stat == "kappa":
        out = dumps(stats.kappa_stats(data, args.a_exp))
    else:
        out = dumps(stats.selberg_violations(data, _phi_growth(args.phi)))
    _emit(args, out)
    return code


def _phi_growth(spec: str):
    """'loglog', 'const:C' or 'power:p' (Phi(n) = n^p)."""
    if spec == "loglog":
        return lambda n: np.log(np.log(n))
    kind, _, value = spec.partition(":")
    try:
        x = float(value)
    except ValueError:
        raise UsageError(f"bad --phi {spec!r}") from None
    if kind == "const" and x > 0:
        return lambda n: np.full(np.shape(n), x) if np.ndim(n) else x
    if kind == "power" and x > 0:
        return lambda n: np.asarray(n, dtype=float) ** x
    raise UsageError(f"bad --phi {spec!r}")


def cmd_plot_data(args):
    if not args.t_from < args.t_to:
        raise UsageError("need --from < --to")
    table = load_table(args.table) if args.table else pipeline.table_for_heights(
        args.t_from, args.t_to, threads=args.threads)
    points = s_sawtooth(table, args.t_from, args.t_to, samples=args.samples)
    _emit(args, sawtooth_to_csv(points))
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    threads = os.cpu_count() or 1
    parser = _Parser(prog="gramlaw", description="Gram points, zeta zeros and Gram's-law statistics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("zeros", help="compute or ingest a certified zero table")
    p.add_argument("--upto-index", type=int)
    p.add_argument("--first-index", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--ingest", metavar="FILE")
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=threads)
    p.add_argument("--max-zeros", type=int, default=DEFAULT_MAX_ZEROS)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("gram", help="print Gram points")
    p.add_argument("index", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--classical", action="store_true",
                   help="index and label by theta(g_m) = m pi")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gram)

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--window", type=parse_window, required=True, metavar="N:M")
    window.add_argument("--preset", choices=["paper"])
    window.add_argument("--eps", type=float, default=0.001)
    window.add_argument("--table", help="cached zero table to use instead of the cache")
    window.add_argument("--threads", type=int, default=threads)
    window.add_argument("--out")

    p = sub.add_parser("seq", parents=[window], help="export per-index sequences")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("stats", help="window statistics")
    ssub = p.add_subparsers(dest="stat", required=True, parser_class=_Parser)
    s = ssub.add_parser("moments", parents=[window])
    s.add_argument("--quantity", choices=stats.QUANTITIES, default="delta_lower")
    s.add_argument("--even-k", type=int)
    s.add_argument("--odd-k", type=int)
    s.add_argument("--abs", type=float, metavar="A")
    s = ssub.add_parser("cdf", parents=[window])
    s.add_argument("--quantity", choices=stats.CDF_QUANTITIES, default="delta_upper")
    s.add_argument("--lo", type=float, default=-4.0)
    s.add_argument("--hi", type=float, default=4.0)
    s.add_argument("--step", type=float, default=0.1)
    s.add_argument("--format", choices=["csv", "json"], default="json")
    for name in ("counts", "lemma2"):
        s = ssub.add_parser(name, parents=[window])
        s.add_argument("--a", type=int, required=True)
        s.add_argument("--b", type=int, required=True)
    ssub.add_parser("extremes", parents=[window])
    s = ssub.add_parser("kappa", parents=[window])
    s.add_argument("--a", dest="a_exp", type=float, default=1.0)
    s = ssub.add_parser("selberg", parents=[window])
    s.add_argument("--phi", default="loglog", help="loglog, const:C or power:p")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("plot-data", help="S(t) sawtooth polyline as CSV")
    p.add_argument("--from", dest="t_from", type=float, required=True)
    p.add_argument("--to", dest="t_to", type=float, required=True)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--table")
    p.add_argument("--threads", type=int, default=threads)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"gramlaw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CertificationError, CoverageError, TableFormatError) as exc:
        print(f"gramlaw: error: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (ConvergenceError, UnresolvedBlockError) as exc:
        print(f"gramlaw: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FileNotFoundError as exc:
        print(f"gramlaw: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
