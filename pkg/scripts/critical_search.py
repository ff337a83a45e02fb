#!/usr/bin/env python3
"""Bisection for the critical amplitude separating dispersion from blow-up.

Each probe run uses the Rattle integrator and stops as soon as the solution
wraps through the south pole near the origin (the blow-up signature), so
supercritical probes terminate early.
"""
import argparse
import sys

from wavemap.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid-n", type=int, default=641)
    parser.add_argument("--a-lo", type=float, default=0.80)
    parser.add_argument("--a-hi", type=float, default=0.83)
    parser.add_argument("--tol-a", type=float, default=1e-4)
    parser.add_argument("--t-end", type=float, default=1.6)
    parser.add_argument("--out", default="results/critical")
    args = parser.parse_args()
    return cli_main(["critical-search",
                     "--grid-n", str(args.grid_n),
                     "--domain", "quarter",
                     "--t-end", str(args.t_end),
                     "--a-lo", str(args.a_lo),
                     "--a-hi", str(args.a_hi),
                     "--tol-a", str(args.tol_a),
                     "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
