"""Command-line entry point.

    diffuselab <experiment> [--config PATH] [--seed N] [--out DIR] [--workers N]

Without --config the shipped default for the experiment is used; --seed
overrides the config's seed. The exit code is 0 when the experiment ran and
every pass flag it computes is true, 1 when a pass flag is false, and 2 on
configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path as FsPath

from .errors import DiffuselabError
from .experiments import EXPERIMENTS, RUNNERS, load_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffuselab",
        description="Simulate diffusions, solve their PDEs, and check that the two sides agree.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=FsPath, default=None, help="JSON config (default: shipped config)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", type=FsPath, default=FsPath("."), help="output directory (default: cwd)")
        p.add_argument("--workers", type=int, default=1, help="worker threads for ensemble blocks")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.experiment, args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise DiffuselabError(f"--seed must be non-negative, got {args.seed}")
            cfg = dict(cfg, seed=args.seed)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        result = RUNNERS[args.experiment](cfg, out_dir, n_workers=args.workers)
    except DiffuselabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    passed = result.get("pass")
    if passed is None:
        print(f"{args.experiment}: done")
        return 0
    print(f"{args.experiment}: {'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
