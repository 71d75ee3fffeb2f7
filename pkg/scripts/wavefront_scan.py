#!/usr/bin/env python3
"""Locate the propagation front of the kernel at several times and compare with the group-velocity bound.

Example:
    python3 scripts/wavefront_scan.py --times 250 500 1000 2000
"""
import argparse
import sys

import numpy as np

from dirac_lattice import Potential
from dirac_lattice.evolution import kernel_scan, wavefront_velocity


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--q0", type=float, default=0.0, help="strength of a single site at the origin")
    p.add_argument("--times", type=float, nargs="+", default=[250.0, 500.0, 1000.0, 2000.0])
    p.add_argument("--points", type=int, default=401)
    args = p.parse_args(argv)

    pot = Potential(args.mass, ((0, args.q0),) if args.q0 else ())
    v_front = wavefront_velocity(args.mass)
    v = np.linspace(0.5 * v_front, 1.2 * v_front, args.points)
    print(f"front velocity {v_front:.6f}")
    print(f"{'t':>8} {'argmax v':>10} {'rel. gap':>9} {'peak':>11} {'peak*t^(1/3)':>13}")
    for t in args.times:
        scan = kernel_scan(pot, t, v)
        peak = float(scan.sup_block.max())
        gap = scan.argmax_v / v_front - 1.0
        print(f"{t:>8g} {scan.argmax_v:>10.5f} {gap:>9.2%} {peak:>11.4e} {peak * t ** (1 / 3):>13.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
