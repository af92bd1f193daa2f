"""Command-line entry point: one figure kind per invocation.

Usage:
    render_figure --kind <kind> --in <csv...> --out <image> [--title T]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_KINDS, FigureError, FigureJob, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figure",
        description="Render a static figure from simulation CSV output",
    )
    parser.add_argument("--kind", required=True, choices=list(FIGURE_KINDS))
    parser.add_argument("--in", dest="inputs", required=True, nargs="+", type=Path,
                        metavar="CSV")
    parser.add_argument("--out", required=True, type=Path, metavar="IMAGE")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    try:
        job = FigureJob(kind=args.kind, inputs=tuple(args.inputs), output=args.out,
                        title=args.title)
        result = render(job)
    except FigureError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(result.path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
