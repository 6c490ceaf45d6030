"""Script entry point: ``render --job <jobfile>``."""

from __future__ import annotations

import argparse
import sys

from .jobs import JobError, load_job
from .render import render
from .trajectory_io import InputError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render", description="render a figure from simulator output files")
    parser.add_argument("--job", required=True, help="path to the plot-job JSON")
    args = parser.parse_args(argv)
    try:
        job = load_job(args.job)
        out = render(job)
    except (JobError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
