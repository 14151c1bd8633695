"""Command line entry point: figviz render --job <json>."""

from __future__ import annotations

import argparse
import sys

from .errors import FigvizError
from .jobs import load_job
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figviz", description="Render figures from CSV artifacts.")
    sub = parser.add_subparsers(dest="command", required=True)
    cmd = sub.add_parser("render", help="render one job document to a PNG")
    cmd.add_argument("--job", required=True, help="path to a render job JSON file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = load_job(args.job)
        result = render(job)
    except (FigvizError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{result.kind}: wrote {result.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
