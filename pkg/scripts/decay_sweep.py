#!/usr/bin/env python3
"""Fit log-log decay exponents of weighted propagator norms over a time range.

Example:
    python3 scripts/decay_sweep.py --site 0:0.5 --norm l11_to_linf_m1 --norm l2sig:1.6
"""
import argparse
import csv
import sys
import time

from dirac_lattice import Potential
from dirac_lattice.config import NormSpec
from dirac_lattice.evolution import decay_fit, geometric_grid


def parse_site(text: str) -> tuple[int, float]:
    n, q = text.split(":")
    return int(n), float(q)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--site", action="append", default=[], type=parse_site, help="n:q, repeatable")
    p.add_argument("--norm", action="append", default=[], help="l1_to_linf, l11_to_linf_m1 or l2sig:SIGMA")
    p.add_argument("--t-min", type=float, default=100.0)
    p.add_argument("--t-max", type=float, default=3200.0)
    p.add_argument("--points", type=int, default=12)
    p.add_argument("--csv", help="write samples to this file")
    args = p.parse_args(argv)

    pot = Potential(args.mass, tuple(sorted(args.site)))
    specs = [NormSpec.parse(s) for s in (args.norm or ["l1_to_linf"])]
    t = geometric_grid(args.t_min, args.t_max, args.points)
    rows = []
    print(f"{'norm':<28} {'exponent':>9} {'stderr':>8} {'envelope':>9} {'seconds':>8}")
    for norm_spec in specs:
        start = time.perf_counter()
        fit = decay_fit(pot, norm_spec.kind, t, sigma=norm_spec.sigma)
        took = time.perf_counter() - start
        print(f"{norm_spec.label:<28} {fit.exponent:>9.4f} {fit.ci:>8.4f} {str(fit.envelope):>9} {took:>8.1f}")
        rows += [[norm_spec.label, f"{ti:.17g}", f"{yi:.17g}"] for ti, yi in zip(fit.t, fit.norm)]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["norm", "t", "value"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
