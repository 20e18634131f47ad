#!/usr/bin/env python3
"""End-to-end demonstration of the potential reconstruction.

Manufactures a plane-wave solution in a chosen constant potential, runs
the inversion pipeline with closed-form derivatives, and prints every
residual check plus the recovered potential.
"""

import argparse

import numpy as np

from dkp5 import (
    PlaneWaveSpec,
    build_representation,
    invert_pipeline,
    manufacture_plane_wave,
    on_shell_momentum,
    plane_wave_gradient,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=float, default=1.0)
    parser.add_argument("--e", type=float, default=1.0)
    parser.add_argument("--A", type=float, nargs=4, default=[0.5, -0.1, 0.2, 0.0],
                        metavar=("A0", "A1", "A2", "A3"))
    parser.add_argument("--k-spatial", type=float, nargs=3, default=[0.3, 0.0, 0.0])
    parser.add_argument("--amplitude", type=complex, default=0.8 + 0.3j)
    args = parser.parse_args()

    A = tuple(args.A)
    p = on_shell_momentum(args.k_spatial, args.m, args.e, A)
    spec = PlaneWaveSpec(p=p, A=A, m=args.m, e=args.e, amplitude=args.amplitude)
    grid = manufacture_plane_wave(spec, (7, 8, 1, 1), (0.15, 0.14, 1.0, 1.0))
    dphi = plane_wave_gradient(spec, grid)

    rep = build_representation("float")
    out, checks = invert_pipeline(rep, grid, args.m, args.e, dphi=dphi, A_ref=A)

    print(f"reference potential A* = {np.array(A)}")
    print(f"recovered A_full[0]    = {np.real(out.a_full.values[0, 0, 0, 0])}")
    print(f"gauge-fixed route[0]   = {np.real(out.a_gauge_fixed.values[0, 0, 0, 0])}")
    print(f"gauge term[0]          = {np.real(out.gauge_term.values[0, 0, 0, 0])}")
    print()
    for entry in checks:
        flag = "PASS" if entry["pass"] else "FAIL"
        print(f"{flag}  {entry['identity']:<48} max_abs = {entry['max_abs']:.3e}")
    failed = [c for c in checks if not c["pass"]]
    print()
    print("all checks passed" if not failed else f"{len(failed)} checks FAILED")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
