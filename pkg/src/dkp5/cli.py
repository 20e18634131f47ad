"""Batch command-line front end.

Subcommands: verify-algebra, reduce-word, manufacture, currents, invert,
residuals.  Exit codes are a stable contract: 0 all checks pass, 1
quantitative failure (identity residual over tolerance, mass-shell
violation), 2 structural or domain error (bad file, bad shape, empty
domain, bad arguments).

Four-vectors are given as comma-separated reals in index order 0,1,2,3
(lower components); all physics parameters are explicit, there are no
hidden defaults for m and e.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys

import numpy as np

from . import __version__
from .algebra import (
    build_representation,
    enumerate_basis,
    representation_from_betas,
    verify_algebra_identities,
)
from .bilinears import (
    compute_currents,
    compute_currents_grid,
    current_set_to_dict,
    fierz_residual,
)
from .errors import DkpError, EmptyDomainError, MassShellError, ParameterError
from .grids import SCALAR, FieldGrid, load_grid, max_abs, rms, store_grid
from .inversion import (
    divergence_identities,
    h_elimination_residual,
    invert_pipeline,
    reduced_state,
    reduced_system_residuals,
    singular_mask,
)
from .planewave import (
    PlaneWaveSpec,
    constant_four_vector_grid,
    manufacture_plane_wave,
    plane_wave_gradient,
)
from .reports import all_pass, entry_from_values, report_entry, write_report
from .scalars import EXACT, FLOAT, is_exact_zero, magnitude, random_exact_wavefunction
from .words import BASIS_LABELS, reduce_word, word_reduction_sweep

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_STRUCTURAL = 2


def _four_vector(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"need 4 comma-separated reals, got {text!r}")
    return tuple(parts)


def _extents(text):
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 4 or any(n < 1 for n in parts):
        raise argparse.ArgumentTypeError(f"need 4 positive ints, got {text!r}")
    return tuple(parts)


def _spacing(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 1:
        parts = parts * 4
    if len(parts) != 4 or any(not h > 0 for h in parts):
        raise argparse.ArgumentTypeError(f"need 1 or 4 positive reals, got {text!r}")
    return tuple(parts)


def _complex_amplitude(text):
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise argparse.ArgumentTypeError(f"amplitude is re or re,im, got {text!r}")


def _word(text):
    text = text.strip()
    if not text:
        return []
    return [int(x) for x in text.split(",")]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dkp",
        description="5-component DKP algebra, currents, and potential inversion",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-algebra", help="check every matrix identity family")
    p.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT)
    p.add_argument("--max-word-len", type=int, default=3,
                   help="word-reduction sweep depth; 0 skips the sweep")
    p.add_argument("--tol", type=float, default=1e-12, help="float-mode tolerance")
    p.add_argument("--fierz-samples", type=int, default=0,
                   help="also check the rank-one rearrangement on N random exact wavefunctions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", dest="json_path", help="write the report here")
    p.add_argument("--corrupt-generator", type=int, choices=range(4),
                   help=argparse.SUPPRESS)  # test hook: zero out one generator
    p.set_defaults(func=cmd_verify_algebra)

    p = sub.add_parser("reduce-word", help="expand a generator word on the 25-element basis")
    p.add_argument("word", type=_word, help="comma-separated indices in 0..3; empty for I")
    p.add_argument("--json", dest="json_path")
    p.set_defaults(func=cmd_reduce_word)

    p = sub.add_parser("manufacture", help="sample an exact plane-wave solution onto a grid file")
    p.add_argument("--p", type=_four_vector, required=True, help="phase momentum, lower index")
    p.add_argument("--A", type=_four_vector, required=True, help="constant potential, lower index")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--amplitude", type=_complex_amplitude, default=complex(1.0))
    p.add_argument("--extents", type=_extents, required=True)
    p.add_argument("--spacing", type=_spacing, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_manufacture)

    p = sub.add_parser("currents", help="bilinear currents at every point of a stored grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--json", dest="json_path")
    p.add_argument("--csv", dest="csv_path")
    p.set_defaults(func=cmd_currents)

    p = sub.add_parser("invert", help="reconstruct the potential and field strength from a grid")
    _add_residual_args(p)
    p.add_argument("-o", "--outdir", help="write the output grids here")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("residuals", help="diagnostic residuals of the constraint and reduced systems")
    _add_residual_args(p)
    p.set_defaults(func=cmd_residuals)

    return parser


def _add_residual_args(p):
    p.add_argument("--grid", required=True)
    p.add_argument("--sidecar", help="manufacture sidecar JSON (default: <grid>.json if present)")
    p.add_argument("--m", type=float)
    p.add_argument("--e", type=float)
    p.add_argument("--A", dest="A_flag", type=_four_vector,
                   help="constant reference potential when no sidecar is given")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--analytic", action="store_true",
                      help="closed-form derivatives (requires a plane-wave sidecar)")
    mode.add_argument("--fd", action="store_true", help="finite differences (default)")
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--json", dest="json_path")
    p.add_argument("--csv", dest="csv_path")


def cmd_verify_algebra(args) -> int:
    rep = build_representation(args.mode)
    if args.corrupt_generator is not None:
        betas = list(rep.beta)
        betas[args.corrupt_generator] = 0 * betas[args.corrupt_generator]
        rep = representation_from_betas(betas, args.mode)
    checks = verify_algebra_identities(rep, tol=args.tol)
    entries = [
        report_entry(c.name, c.max_abs, c.rms, 0.0, 0.0 if args.mode == EXACT else args.tol)
        for c in checks
    ]
    # In exact mode pass/fail is literal zero, not a tolerance comparison.
    if args.mode == EXACT:
        for entry, check in zip(entries, checks):
            entry["pass"] = check.passed
    failed = [c.name for c in checks if not c.passed]

    sweep = None
    if args.max_word_len > 0 and not failed:
        words, mismatches, max_res = word_reduction_sweep(rep, args.max_word_len, tol=args.tol)
        sweep = {"words": words, "mismatches": mismatches, "max_abs": max_res}
        if mismatches:
            failed.append("word_reduction_sweep")

    fierz = None
    if args.fierz_samples > 0 and not failed:
        # The rearrangement sweep always runs in exact arithmetic.
        exact_rep = rep if args.mode == EXACT else build_representation(EXACT)
        rng = random.Random(args.seed)
        worst = 0.0
        bad = 0
        for _ in range(args.fierz_samples):
            phi = random_exact_wavefunction(rng)
            r_h, r_c = fierz_residual(exact_rep, phi)
            flat = list(r_h.reshape(-1)) + list(r_c.reshape(-1))
            if any(not is_exact_zero(x) for x in flat):
                bad += 1
                worst = max(worst, max(magnitude(x) for x in flat))
        fierz = {"samples": args.fierz_samples, "failures": bad, "max_abs": worst}
        if bad:
            failed.append("fierz_rearrangement_sweep")

    payload = {
        "mode": args.mode,
        "identities": entries,
        "word_sweep": sweep,
        "fierz_sweep": fierz,
    }

    if failed:
        payload["failed"] = failed
        _emit(args, payload)
        print(f"FAIL: {', '.join(failed)}")
        return EXIT_FAIL

    try:
        _, rank = enumerate_basis(rep)
    except DkpError as exc:
        print(f"representation defect: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    payload["basis_rank"] = rank
    _emit(args, payload)
    print(f"PASS: {len(checks)} identity families"
          + (f", {sweep['words']} words" if sweep else ""))
    return EXIT_PASS


def _emit(args, payload):
    if getattr(args, "json_path", None):
        write_report(args.json_path, payload)


def cmd_reduce_word(args) -> int:
    combo = reduce_word(args.word)
    payload = {
        "word": list(args.word),
        "labels": list(BASIS_LABELS),
        "coefficients": combo.to_json_obj(),
    }
    text = json.dumps(payload, indent=2)
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_PASS


def cmd_manufacture(args) -> int:
    spec = PlaneWaveSpec(p=args.p, A=args.A, m=args.m, e=args.e, amplitude=args.amplitude)
    try:
        grid = manufacture_plane_wave(spec, args.extents, args.spacing)
    except MassShellError as exc:
        print(f"off shell: |k.k - m^2| = {exc.violation:.6e}", file=sys.stderr)
        return EXIT_FAIL
    store_grid(grid, args.output)
    sidecar = {
        "p": list(args.p),
        "A": list(args.A),
        "m": args.m,
        "e": args.e,
        "amplitude": [args.amplitude.real, args.amplitude.imag],
        "extents": list(args.extents),
        "spacing": list(args.spacing),
    }
    write_report(args.output + ".json", sidecar)
    print(f"wrote {args.output} ({grid.n_points} points) and {args.output}.json")
    return EXIT_PASS


def cmd_currents(args) -> int:
    _check_distinct_paths(args.grid, args.json_path, args.csv_path)
    grid = load_grid(args.grid)
    rep = build_representation(FLOAT)
    cg = compute_currents_grid(rep, grid)
    rows = []
    for idx in np.ndindex(*grid.extents):
        cs = compute_currents(rep, grid.values[idx])
        row = {"it": idx[0], "ix": idx[1], "iy": idx[2], "iz": idx[3]}
        row.update(current_set_to_dict(cs))
        rows.append(row)
    if args.json_path:
        write_report(args.json_path, {"extents": list(grid.extents), "points": rows})
    if args.csv_path:
        _write_csv(args.csv_path, rows)
    if not args.json_path and not args.csv_path:
        print(json.dumps(rows[: min(len(rows), 4)], indent=2))
    print(f"{len(rows)} points, mean S = {float(np.mean(cg.S)):.6g}")
    return EXIT_PASS


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _check_distinct_paths(input_path, *outputs):
    import os

    seen = os.path.abspath(input_path)
    for out in outputs:
        if out and os.path.abspath(out) == seen:
            raise ParameterError(f"output path {out!r} collides with the input grid")


def _load_sidecar(args):
    path = args.sidecar
    if path is None:
        candidate = args.grid + ".json"
        try:
            with open(candidate) as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None
    with open(path) as fh:
        return json.load(fh)


def _resolve_physics(args, sidecar):
    m = args.m if args.m is not None else (sidecar or {}).get("m")
    e = args.e if args.e is not None else (sidecar or {}).get("e")
    if m is None or e is None:
        raise ParameterError("m and e must be given explicitly (flags or sidecar)")
    return float(m), float(e)


def _resolve_derivatives(args, sidecar, grid):
    if not args.analytic:
        return None
    if sidecar is None:
        raise ParameterError("--analytic requires a plane-wave sidecar")
    amp = sidecar["amplitude"]
    spec = PlaneWaveSpec(
        p=sidecar["p"], A=sidecar["A"], m=sidecar["m"], e=sidecar["e"],
        amplitude=complex(amp[0], amp[1]),
    )
    return plane_wave_gradient(spec, grid)


def _resolve_a_ref(args, sidecar):
    if args.A_flag is not None:
        return np.array(args.A_flag)
    if sidecar is not None:
        return np.array(sidecar["A"], dtype=float)
    return None


def cmd_invert(args) -> int:
    _check_distinct_paths(args.grid, args.json_path, args.csv_path)
    grid = load_grid(args.grid)
    sidecar = _load_sidecar(args)
    m, e = _resolve_physics(args, sidecar)
    dphi = _resolve_derivatives(args, sidecar, grid)
    a_ref = _resolve_a_ref(args, sidecar)
    rep = build_representation(FLOAT)
    try:
        out, entries = invert_pipeline(
            rep, grid, m, e, dphi=dphi, A_ref=a_ref, tolerance=args.tolerance
        )
    except EmptyDomainError as exc:
        print(f"empty domain: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    masked_fraction = float(out.singular_mask.mean())
    payload = {
        "grid": args.grid,
        "m": m,
        "e": e,
        "derivatives": "analytic" if dphi is not None else "finite-difference",
        "masked_fraction": masked_fraction,
        "checks": entries,
    }
    if args.outdir:
        import os

        os.makedirs(args.outdir, exist_ok=True)
        store_grid(out.a_full, os.path.join(args.outdir, "A_full.dkp5"))
        store_grid(out.a_gauge_fixed, os.path.join(args.outdir, "A_gauge_fixed.dkp5"))
        store_grid(out.gauge_term, os.path.join(args.outdir, "gauge_term.dkp5"))
        store_grid(out.f_from_potential, os.path.join(args.outdir, "F_potential.dkp5"))
        store_grid(out.f_bilinear, os.path.join(args.outdir, "F_bilinear.dkp5"))
        mask_grid = FieldGrid(
            grid.extents, grid.spacing, SCALAR, out.singular_mask.astype(complex)
        )
        store_grid(mask_grid, os.path.join(args.outdir, "mask.dkp5"))
    if args.json_path:
        write_report(args.json_path, payload)
    if args.csv_path:
        _residual_csv(args.csv_path, grid, out, entries)
    for entry in entries:
        print(f"{'PASS' if entry['pass'] else 'FAIL'} {entry['identity']}: "
              f"max_abs={entry['max_abs']:.3e} tol={entry['tolerance']:.3e}")
    return EXIT_PASS if all_pass(entries) else EXIT_FAIL


def _residual_csv(path, grid, out, entries):
    decomp = out.a_full.values - out.a_gauge_fixed.values - out.gauge_term.values
    rows = []
    for idx in np.ndindex(*grid.extents):
        rows.append(
            {
                "it": idx[0], "ix": idx[1], "iy": idx[2], "iz": idx[3],
                "masked": int(out.singular_mask[idx]),
                "decomposition": float(np.max(np.abs(decomp[idx]))),
                "a_full_norm": float(np.max(np.abs(out.a_full.values[idx]))),
                "f_potential_norm": float(np.max(np.abs(out.f_from_potential.values[idx]))),
                "f_bilinear_norm": float(np.max(np.abs(out.f_bilinear.values[idx]))),
            }
        )
    _write_csv(path, rows)


def cmd_residuals(args) -> int:
    _check_distinct_paths(args.grid, args.json_path, args.csv_path)
    grid = load_grid(args.grid)
    sidecar = _load_sidecar(args)
    m, e = _resolve_physics(args, sidecar)
    dphi = _resolve_derivatives(args, sidecar, grid)
    a_ref = _resolve_a_ref(args, sidecar)
    if a_ref is None:
        raise ParameterError("need a reference potential (--A flag or sidecar)")
    rep = build_representation(FLOAT)
    cg = compute_currents_grid(rep, grid)
    mask = singular_mask(cg)
    if mask.all():
        print("empty domain: every point is Z-singular", file=sys.stderr)
        return EXIT_STRUCTURAL
    A_grid = constant_four_vector_grid(a_ref, grid.extents, grid.spacing)
    div = divergence_identities(rep, grid, A_grid, m, e, dphi=dphi, cg=cg)
    h_res = h_elimination_residual(cg, m)
    state = reduced_state(cg, m, e)
    rres = reduced_system_residuals(state)
    tol = args.tolerance
    entries = [
        entry_from_values("current_conservation", div.dJ, mask, tol),
        entry_from_values("companion_divergence", div.dH, mask, tol),
        entry_from_values("current_potential_contraction", div.JA, mask, tol),
        entry_from_values("companion_potential_contraction", div.HA, mask, tol),
        entry_from_values("h_elimination", h_res.values, mask, tol),
        entry_from_values("reduced_conservation", rres.conservation, mask, tol),
        entry_from_values("reduced_modulus", rres.modulus, mask, tol),
        entry_from_values("reduced_field_eq_lhs_cross_check", rres.lhs_cross_check, mask, tol),
    ]
    payload = {
        "grid": args.grid,
        "m": m,
        "e": e,
        "derivatives": "analytic" if dphi is not None else "finite-difference",
        "masked_fraction": float(mask.mean()),
        "checks": entries,
        "diagnostics": {
            "reduced_field_eq_max_abs": max_abs(rres.field_eq, mask),
            "reduced_field_eq_rms": rms(rres.field_eq, mask),
        },
    }
    if args.json_path:
        write_report(args.json_path, payload)
    if args.csv_path:
        rows = []
        for idx in np.ndindex(*grid.extents):
            rows.append(
                {
                    "it": idx[0], "ix": idx[1], "iy": idx[2], "iz": idx[3],
                    "masked": int(mask[idx]),
                    "dJ": float(abs(div.dJ[idx])),
                    "dH": float(abs(div.dH[idx])),
                    "JA": float(abs(div.JA[idx])),
                    "HA": float(abs(div.HA[idx])),
                    "h_elimination": float(np.max(np.abs(h_res.values[idx]))),
                    "reduced_conservation": float(abs(rres.conservation[idx])),
                    "reduced_modulus": float(abs(rres.modulus[idx])),
                    "reduced_field_eq": float(np.max(np.abs(rres.field_eq[idx]))),
                }
            )
        _write_csv(args.csv_path, rows)
    for entry in entries:
        print(f"{'PASS' if entry['pass'] else 'FAIL'} {entry['identity']}: "
              f"max_abs={entry['max_abs']:.3e}")
    print(f"diagnostic reduced_field_eq max_abs={payload['diagnostics']['reduced_field_eq_max_abs']:.3e}")
    return EXIT_PASS


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DkpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURAL


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
