"""Command line entry: ``plot errors <dat> <out>`` / ``plot surface <dat> <out>``."""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")  # render headless; must precede any pyplot import

from .figures import load_table, render_error_plot, render_surface


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render figures from emitted .dat files."
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    errors = sub.add_parser("errors", help="error-vs-depth line chart")
    errors.add_argument("table", help="error table (.dat)")
    errors.add_argument("out", help="image file to write (suffix picks the format)")

    surface = sub.add_parser("surface", help="3-D surface view")
    surface.add_argument("dat", help="gridded surface samples (.dat)")
    surface.add_argument("out", help="image file to write (suffix picks the format)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "errors":
            out = render_error_plot(load_table(args.table), args.out)
        else:
            out = render_surface(args.dat, args.out)
    except (OSError, ValueError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
