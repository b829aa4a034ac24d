"""figplots <figure-id> --in CSV [CSV ...] --out IMAGE [--log-sigma] [--n N]"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FIGURE_IDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figplots", description=__doc__)
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV paths")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--log-sigma", action="store_true",
                        help="logarithmic sigma axis (fig2)")
    parser.add_argument("--n", type=int, default=None,
                        help="particle number for guide lines when no sidecar")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        figure_id=args.figure_id,
        inputs=tuple(Path(p) for p in args.inputs),
        output=Path(args.out),
        log_sigma=args.log_sigma,
        n_particles=args.n,
    )
    try:
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
