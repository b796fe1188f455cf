"""Command-line front end: render one figure from a result CSV."""

import argparse
import sys

from lspfigures.render import FigureSpec, Metric, render


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1, not 2."""

    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lspfigures",
                     description="Render secrecy-sweep figures from CSV")
    sub = parser.add_subparsers(dest="subcommand")
    rend = sub.add_parser("render", help="render one metric/collusion figure")
    rend.add_argument("--csv", required=True, help="input result CSV")
    rend.add_argument("--metric", required=True,
                      choices=[m.value for m in Metric])
    rend.add_argument("--collusion", required=True, choices=["TC", "PC"])
    rend.add_argument("--out", required=True, help="output image path (.svg)")
    rend.add_argument("--error-bars", action="store_true",
                      help="draw standard-error bars")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise _UsageError("a subcommand is required")
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        spec = FigureSpec(metric=Metric(args.metric),
                          collusion=args.collusion,
                          input_csv=args.csv,
                          output_image=args.out,
                          error_bars=args.error_bars)
        result = render(spec)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.output_image} ({len(result.curves)} curves)")
    return 0
