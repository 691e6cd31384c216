"""``acdelay`` command line.

Exit status: 0 on success, 2 on invalid input, 1 on runtime failure.
"""
from __future__ import annotations

import argparse
import sys

from .. import bounds
from ..coder import Decoder, Encoder
from ..exact import as_fraction
from ..source import MemorylessSource, SourceValidationError
from .harness import EnumerationBudgetError, run_exact_tail, run_monte_carlo
from .output import FIGURES, emit_figure, markov_check_command, stats_rows, write_csv
from .specfile import SourceSpecError, parse_source_spec


class UsageError(ValueError):
    pass


def _letters(text: str) -> list:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise UsageError("letters must be whitespace-separated integers") from None


def _read_input(path):
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _alpha_of(source):
    return source.alpha() if isinstance(source, MemorylessSource) else None


def cmd_encode(args):
    source = parse_source_spec(args.source)
    enc = Encoder(source)
    bits = "".join(enc.push(x) for x in _letters(_read_input(args.input)))
    if args.flush:
        bits += enc.flush()
    print(bits)


def cmd_decode(args):
    source = parse_source_spec(args.source)
    text = "".join(_read_input(args.input).split())
    if set(text) - {"0", "1"}:
        raise UsageError("bit stream may only contain '0' and '1'")
    dec = Decoder(source, args.count)
    for ch in text:
        dec.push(int(ch))
    print(" ".join(map(str, dec.letters_emitted)))


def cmd_simulate(args):
    source = parse_source_spec(args.source)
    prefix = _letters(args.prefix) if args.prefix is not None else None
    stats = run_monte_carlo(source, args.n, args.trials, args.dmax, args.seed, prefix, args.workers)
    alpha = _alpha_of(source)
    header = ["d", "tail", "tail_float"] + (["tail_bound"] if alpha is not None else [])
    write_csv(args.out, header, stats_rows(stats, alpha))
    bound = "lower bound" if stats.mean_is_lower_bound else "estimate"
    print(f"trials: {stats.trials}  censored: {stats.censored}")
    print(f"mean delay ({bound}): {float(stats.mean):.6g} +- {stats.stderr:.3g}")
    if alpha is not None:
        print(f"D1 = {float(bounds.d1_bound(alpha)):.6g}  D2 = {float(bounds.d2_bound(alpha)):.6g}  "
              f"Dmg = {float(bounds.modified_gallager(alpha)):.6g}")


def cmd_exact_tail(args):
    source = parse_source_spec(args.source)
    prefix = _letters(args.prefix or "")
    for x in prefix:
        source.check_letter(x)
    stats = run_exact_tail(source, prefix, args.dmax)
    alpha = _alpha_of(source)
    header = ["d", "tail", "tail_float"] + (["tail_bound"] if alpha is not None else [])
    text = write_csv(args.out, header, stats_rows(stats, alpha))
    if args.out is None:
        sys.stdout.write(text)


def cmd_bounds(args):
    if args.source:
        source = parse_source_spec(args.source)
        if not isinstance(source, MemorylessSource):
            raise UsageError("bounds needs a memoryless source; use markov-check for chains")
        alpha, beta = source.alpha(), source.beta()
    elif args.alpha is not None:
        alpha = as_fraction(args.alpha)
        beta = as_fraction(args.beta) if args.beta is not None else None
    else:
        raise UsageError("give --alpha or --source")
    rows = [
        ["D1", bounds.d1_bound(alpha)],
        ["Dmg", bounds.modified_gallager(alpha)],
        ["D2", bounds.d2_bound(alpha)],
        ["D3", bounds.d3_bound(alpha)],
        ["d0", bounds.d0_of(alpha)],
        ["d1", bounds.d1_of(alpha)],
    ]
    if beta is not None:
        rows.insert(1, ["Dg", bounds.gallager_bound(alpha, beta)])
    rows += [[f"tail({d})", bounds.tail_bound(alpha, d)] for d in range(args.dmax + 1)]
    text = write_csv(args.out, ["quantity", "value"], rows)
    if args.out is None:
        sys.stdout.write(text)


def cmd_figure(args):
    text = emit_figure(args.figure, args.grid, args.out, args.svg)
    if args.out is None:
        sys.stdout.write(text)


def cmd_markov_check(args):
    source = parse_source_spec(args.source)
    report, table = markov_check_command(source, args.dmax, args.tol, args.out)
    sys.stdout.write(report)
    if args.out is None:
        sys.stdout.write(table)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acdelay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    p = add("encode", cmd_encode, "encode whitespace-separated letters to bits")
    p.add_argument("--source", required=True)
    p.add_argument("--input", help="letters file (default: stdin)")
    p.add_argument("--flush", action="store_true",
                   help="append terminating bits (not part of the streaming analysis)")

    p = add("decode", cmd_decode, "decode a '0'/'1' bit stream")
    p.add_argument("--source", required=True)
    p.add_argument("--input", help="bits file (default: stdin)")
    p.add_argument("--count", type=int, help="stop after this many letters")

    p = add("simulate", cmd_simulate, "Monte Carlo delay experiment")
    p.add_argument("--source", required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--dmax", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix", help="fixed prefix letters instead of sampling")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")

    p = add("exact-tail", cmd_exact_tail, "exact Pr(D > d | prefix) by enumeration")
    p.add_argument("--source", required=True)
    p.add_argument("--prefix", default="")
    p.add_argument("--dmax", type=int, default=8)
    p.add_argument("--out")

    p = add("bounds", cmd_bounds, "evaluate the closed-form delay bounds")
    p.add_argument("--source")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--dmax", type=int, default=10, help="tail bounds for d = 0..dmax")
    p.add_argument("--out")

    p = add("figure", cmd_figure, "emit figure data as CSV (and SVG)")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--grid", default="0.001:0.999:0.001", help="lo:hi:step")
    p.add_argument("--out")
    p.add_argument("--svg")

    p = add("markov-check", cmd_markov_check, "check the bounded-delay condition of a source")
    p.add_argument("--source", required=True)
    p.add_argument("--dmax", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        for name in ("n", "trials", "dmax", "workers", "count"):
            v = getattr(args, name, None)
            if v is not None and v < (0 if name in ("n", "count", "dmax") else 1):
                raise UsageError(f"--{name} is out of range")
        args.func(args)
    except (SourceSpecError, SourceValidationError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EnumerationBudgetError, OSError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
