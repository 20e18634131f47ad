#!/usr/bin/env python3
"""Grid-refinement sweep for the finite-difference pipeline.

Manufactures a plane wave in a constant potential whose phase varies only
along t, evaluates the stencil-based residuals at a sequence of spacings,
and prints the observed reduction ratios (second-order stencils should
give ~4 per halving).
"""

import argparse

import numpy as np

from dkp5 import (
    PlaneWaveSpec,
    build_representation,
    compute_currents_grid,
    constant_four_vector_grid,
    divergence_identities,
    dkp_residual,
    invert_potential_full,
    manufacture_plane_wave,
)


def residuals_at(rep, p, A, m, e, n, h):
    spec = PlaneWaveSpec(p=p, A=A, m=m, e=e, amplitude=1.0)
    grid = manufacture_plane_wave(spec, (n, 1, 1, 1), (h, 1.0, 1.0, 1.0))
    A_grid = constant_four_vector_grid(A, grid.extents, grid.spacing)
    cg = compute_currents_grid(rep, grid)
    res = dkp_residual(rep, grid, A_grid, m, e)
    a_full = invert_potential_full(rep, grid, m, e, cg=cg)
    div = divergence_identities(rep, grid, A_grid, m, e, cg=cg)
    return {
        "equation_residual": np.max(np.abs(res.primary.values)),
        "potential_error": np.max(np.abs(a_full.values - np.array(A))),
        "current_contraction": np.max(np.abs(div.JA)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=float, default=1.0)
    parser.add_argument("--e", type=float, default=1.0)
    parser.add_argument("--A0", type=float, default=0.3)
    parser.add_argument("--A1", type=float, default=0.25)
    parser.add_argument("--base-n", type=int, default=8)
    parser.add_argument("--base-h", type=float, default=0.25)
    parser.add_argument("--levels", type=int, default=4)
    args = parser.parse_args()

    rep = build_representation("float")
    A = (args.A0, args.A1, 0.0, 0.0)
    # time-only phase: spatial wave vector cancels against the potential
    k1 = -args.e * args.A1
    p = (np.sqrt(args.m**2 + k1**2) + args.e * args.A0, 0.0, 0.0, 0.0)

    rows = []
    n, h = args.base_n, args.base_h
    for _ in range(args.levels):
        rows.append((h, residuals_at(rep, p, A, args.m, args.e, n, h)))
        n, h = 2 * n - 1, h / 2

    names = list(rows[0][1])
    header = f"{'h':>10} " + " ".join(f"{nm:>22}" for nm in names)
    print(header)
    print("-" * len(header))
    for i, (h, vals) in enumerate(rows):
        cells = []
        for nm in names:
            ratio = rows[i - 1][1][nm] / vals[nm] if i else float("nan")
            cells.append(f"{vals[nm]:12.4e} (x{ratio:4.2f})" if i else f"{vals[nm]:12.4e}        ")
        print(f"{h:10.5f} " + " ".join(f"{c:>22}" for c in cells))


if __name__ == "__main__":
    main()
