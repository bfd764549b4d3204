#!/usr/bin/env python3
"""Sweep the adiabatic product-to-Bell dynamics over the mixing fraction
and tabulate how the two information bounds compare.

    python scripts/counterexample_sweep.py --points 21 --out counterexample.csv

Here the bound-gap column is negative throughout (0, 1): the plain
information bound is the tighter one for this process, the mirror image
of the Werner sweep.
"""

import argparse
import sys

from bift.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--lo", type=float, default=0.045)
    ap.add_argument("--hi", type=float, default=0.955)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    argv = ["sweep", "--scenario", "counterexample",
            "--p", f"{args.lo}:{args.hi}:{args.points}"]
    if args.out:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
