"""Bilinear currents of a 5-component wavefunction and their algebra.

Given a wavefunction Phi (5 complex components) and the involution
matrix eta, two conjugate rows are formed:

    Phi_bar   = Phi^dagger eta      (Hermitian sector)
    Phi_tilde = Phi^T eta           (complex, carries twice the phase)

The Hermitian currents are S = Phi_bar Phi, Sflat = Phi_bar b^2 Phi,
J_mu = Phi_bar b_mu Phi, H_mu = Phi_bar c_mu Phi (purely imaginary) and
K_munu = Phi_bar b_mu b_nu Phi (K*_munu = K_numu), with the scalar
density Z = S - Sflat.  The tilde currents use Phi_tilde instead; the
companion tilde current vanishes identically and K-tilde is symmetric.

The rank-one rearrangement machinery lives here as residual evaluators:
the expansion of Phi Phi_bar on the algebra basis, its complex twin for
Phi Phi_tilde, the quadratic relations among the currents, the
elimination of the tensor current, and the zeta-sandwich identities that
tie Z to its complex counterpart.  All of them vanish identically and
are checked exactly in exact mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import METRIC_DIAG, KemmerRep
from .errors import ModeError, ShapeError
from .grids import WAVEFUNCTION, FieldGrid
from .scalars import EXACT, FLOAT, GaussianRational, frac, to_complex

#: Relative scale factor of the |Z| singularity threshold.
Z_EPS = 1e-10


@dataclass
class CurrentSet:
    """All bilinear currents of one wavefunction, lower indices throughout."""

    mode: str
    S: object
    Sflat: object
    J: np.ndarray
    H: np.ndarray
    K: np.ndarray
    Z: object
    tilde_S: object
    tilde_Sflat: object
    tilde_J: np.ndarray
    tilde_K: np.ndarray
    tilde_Z: object


def as_wavefunction(phi, mode):
    """Validate and normalize a 5-component wavefunction for the mode."""
    if mode == EXACT:
        comps = list(phi)
        if len(comps) != 5:
            raise ShapeError(f"wavefunction has {len(comps)} components, want 5")
        out = np.empty(5, dtype=object)
        for i, c in enumerate(comps):
            if isinstance(c, GaussianRational):
                out[i] = c
            elif isinstance(c, (int, Fraction)):
                out[i] = GaussianRational(c)
            else:
                raise ModeError(f"exact-mode wavefunction entry {c!r} is not rational")
        return out
    arr = np.asarray(phi, dtype=complex)
    if arr.shape != (5,):
        raise ShapeError(f"wavefunction has shape {arr.shape}, want (5,)")
    return arr


def compute_currents(rep: KemmerRep, phi) -> CurrentSet:
    """All Hermitian and tilde currents of one wavefunction."""
    phi = as_wavefunction(phi, rep.mode)
    pb = np.conj(phi) @ rep.eta
    pt = phi @ rep.eta

    # Shared matrix-vector products; every current is then a 5-vector dot.
    bphi = [rep.beta[n] @ phi for n in range(4)]
    bsq_phi = rep.beta_sq @ phi
    pb_b = [pb @ rep.beta[m] for m in range(4)]
    pt_b = [pt @ rep.beta[m] for m in range(4)]

    S = pb @ phi
    Sflat = pb @ bsq_phi
    J = np.array([pb_b[m] @ phi for m in range(4)], dtype=object)
    H = np.array([pb @ (rep.beta_dot[m] @ phi) for m in range(4)], dtype=object)
    K = np.array(
        [[pb_b[m] @ bphi[n] for n in range(4)] for m in range(4)], dtype=object
    )
    tS = pt @ phi
    tSflat = pt @ bsq_phi
    tJ = np.array([pt_b[m] @ phi for m in range(4)], dtype=object)
    tK = np.array(
        [[pt_b[m] @ bphi[n] for n in range(4)] for m in range(4)], dtype=object
    )
    if rep.mode == FLOAT:
        # S, Sflat and J are real by construction; drop the round-off phase.
        S, Sflat = complex(S).real, complex(Sflat).real
        J = np.array([complex(x).real for x in J])
        H = H.astype(complex)
        K = K.astype(complex)
        tS, tSflat = complex(tS), complex(tSflat)
        tJ = tJ.astype(complex)
        tK = tK.astype(complex)
    return CurrentSet(
        mode=rep.mode,
        S=S,
        Sflat=Sflat,
        J=J,
        H=H,
        K=K,
        Z=S - Sflat,
        tilde_S=tS,
        tilde_Sflat=tSflat,
        tilde_J=tJ,
        tilde_K=tK,
        tilde_Z=tS - tSflat,
    )


def z_is_singular(cs: CurrentSet) -> bool:
    """Whether |Z| is below the singularity threshold for this point.

    Exact mode asks for Z == 0 literally; float mode compares against
    Z_EPS * max(1, sqrt(S^2 + Sflat^2)).
    """
    if cs.mode == EXACT:
        return not cs.Z
    scale = max(1.0, math.hypot(float(cs.S), float(cs.Sflat)))
    return abs(cs.Z) < Z_EPS * scale


@dataclass
class FierzCoefficients:
    """Expansion coefficients of Phi Phi_bar on {I, b_mu, b_mu b_nu, c_mu}."""

    a: object
    j: np.ndarray
    h: np.ndarray
    k: np.ndarray


def fierz_decompose(cs: CurrentSet) -> FierzCoefficients:
    """Closed-form expansion coefficients in terms of the currents."""
    q = lambda n, d: frac(n, d, cs.mode)
    a = q(5, 9) * cs.S - q(2, 9) * cs.Sflat
    j = np.array([q(1, 2) * cs.J[m] for m in range(4)], dtype=object)
    h = np.array([-q(1, 2) * cs.H[m] for m in range(4)], dtype=object)
    trace_part = q(2, 9) * cs.S + q(1, 9) * cs.Sflat
    k = np.empty((4, 4), dtype=object)
    for m in range(4):
        for n in range(4):
            e = METRIC_DIAG[m] if m == n else 0
            k[m, n] = 2 * (cs.K[n, m] - e * trace_part)
    if cs.mode == FLOAT:
        j = j.astype(float)
        h = h.astype(complex)
        k = k.astype(complex)
    return FierzCoefficients(a=a, j=j, h=h, k=k)


def _rank_one_rhs(rep, cs, tilde):
    """Basis expansion that should reproduce Phi Phi_bar (or Phi Phi_tilde)."""
    q = lambda n, d: frac(n, d, rep.mode)
    g = METRIC_DIAG
    if tilde:
        S, Sflat, J = cs.tilde_S, cs.tilde_Sflat, cs.tilde_J
    else:
        S, Sflat, J = cs.S, cs.Sflat, cs.J
    rhs = (q(5, 9) * S - q(2, 9) * Sflat) * rep.identity
    for m in range(4):
        rhs = rhs + q(1, 2) * g[m] * J[m] * rep.beta[m]
    for m in range(4):
        for n in range(4):
            K_upper_nm = g[n] * g[m] * (cs.tilde_K[n, m] if tilde else cs.K[n, m])
            rhs = rhs + K_upper_nm * (rep.beta[m] @ rep.beta[n])
    if not tilde:
        for m in range(4):
            rhs = rhs - q(1, 2) * g[m] * cs.H[m] * rep.beta_dot[m]
    rhs = rhs - (q(2, 9) * S + q(1, 9) * Sflat) * rep.beta_sq
    return rhs


def fierz_residual(rep: KemmerRep, phi, cs: CurrentSet | None = None):
    """Residuals of the rank-one rearrangement, Hermitian and complex.

    Returns (R_H, R_C): Phi Phi_bar minus its current expansion, and
    Phi Phi_tilde minus the tilde expansion (which omits the companion
    term).  Both vanish identically for every wavefunction.
    """
    phi = as_wavefunction(phi, rep.mode)
    if cs is None:
        cs = compute_currents(rep, phi)
    pb = np.conj(phi) @ rep.eta
    pt = phi @ rep.eta
    r_h = np.outer(phi, pb) - _rank_one_rhs(rep, cs, tilde=False)
    r_c = np.outer(phi, pt) - _rank_one_rhs(rep, cs, tilde=True)
    return r_h, r_c


@dataclass
class ConstraintResiduals:
    """Residuals of the quadratic current relations at one point.

    ``k_elimination`` is None when the point is Z-singular; the other two
    residuals are always populated.
    """

    scalar_fierz: object
    quadratic: object
    k_elimination: np.ndarray | None
    singular_z: bool


def _vector_dot(u, v):
    return sum(METRIC_DIAG[m] * u[m] * v[m] for m in range(4))


def algebraic_constraint_residuals(cs: CurrentSet) -> ConstraintResiduals:
    """Scalar rearrangement relation, tensor-current elimination, and the
    single surviving quadratic constraint."""
    q = lambda n, d: frac(n, d, cs.mode)
    g = METRIC_DIAG
    jj = _vector_dot(cs.J, cs.J)
    hh = _vector_dot(cs.H, cs.H)
    kk = sum(
        g[m] * g[r] * cs.K[m, r] * cs.K[r, m] for m in range(4) for r in range(4)
    )
    scalar_fierz = q(1, 9) * (2 * cs.S + cs.Sflat) ** 2 - q(1, 2) * (jj - hh) - kk
    quadratic = q(1, 4) * (jj - hh) + q(1, 9) * cs.Z * (4 * cs.S - cs.Sflat)
    singular = z_is_singular(cs)
    k_elim = None
    if not singular:
        k_elim = np.empty((4, 4), dtype=object)
        for m in range(4):
            for n in range(4):
                e = g[m] if m == n else 0
                pred = -q(1, 3) * cs.Z * e - q(3, 4) * (cs.J[m] + cs.H[m]) * (
                    cs.J[n] - cs.H[n]
                ) / cs.Z
                k_elim[m, n] = cs.K[m, n] - pred
        if cs.mode == FLOAT:
            k_elim = k_elim.astype(complex)
    return ConstraintResiduals(
        scalar_fierz=scalar_fierz,
        quadratic=quadratic,
        k_elimination=k_elim,
        singular_z=singular,
    )


@dataclass
class ZetaResiduals:
    sandwich: np.ndarray
    modulus: object


def zeta_identity_residuals(rep: KemmerRep, phi, cs: CurrentSet | None = None) -> ZetaResiduals:
    """zeta Phi Phi_tilde zeta - Ztilde zeta, and Z^2 - |Ztilde|^2."""
    phi = as_wavefunction(phi, rep.mode)
    if cs is None:
        cs = compute_currents(rep, phi)
    pt = phi @ rep.eta
    sandwich = rep.zeta @ np.outer(phi, pt) @ rep.zeta - cs.tilde_Z * rep.zeta
    modulus = cs.Z * cs.Z - cs.tilde_Z.conjugate() * cs.tilde_Z
    return ZetaResiduals(sandwich=sandwich, modulus=modulus)


def current_set_to_dict(cs: CurrentSet) -> dict:
    """Flat JSON-ready dict with fixed key order."""
    c = to_complex
    d = {"S": float(c(cs.S).real), "Sflat": float(c(cs.Sflat).real)}
    for m in range(4):
        d[f"J{m}"] = float(c(cs.J[m]).real)
    for m in range(4):
        d[f"ImH{m}"] = float(c(cs.H[m]).imag)
    for m in range(4):
        for n in range(4):
            z = c(cs.K[m, n])
            d[f"ReK{m}{n}"] = z.real
            d[f"ImK{m}{n}"] = z.imag
    d["Z"] = float(c(cs.Z).real)
    zt = c(cs.tilde_S)
    d["ReSt"], d["ImSt"] = zt.real, zt.imag
    zt = c(cs.tilde_Sflat)
    d["ReStflat"], d["ImStflat"] = zt.real, zt.imag
    for m in range(4):
        z = c(cs.tilde_J[m])
        d[f"ReJt{m}"], d[f"ImJt{m}"] = z.real, z.imag
    for m in range(4):
        for n in range(4):
            z = c(cs.tilde_K[m, n])
            d[f"ReKt{m}{n}"], d[f"ImKt{m}{n}"] = z.real, z.imag
    zt = c(cs.tilde_Z)
    d["ReZt"], d["ImZt"] = zt.real, zt.imag
    return d


# ---------------------------------------------------------------------------
# Vectorized currents over grids (float mode only).

@dataclass
class CurrentGrid:
    """Per-point currents over a 4D lattice; leading axes are the grid."""

    extents: tuple
    spacing: tuple
    S: np.ndarray
    Sflat: np.ndarray
    Z: np.ndarray
    J: np.ndarray
    H: np.ndarray
    K: np.ndarray
    tilde_S: np.ndarray
    tilde_Sflat: np.ndarray
    tilde_Z: np.ndarray
    tilde_J: np.ndarray
    tilde_K: np.ndarray


def compute_currents_grid(rep: KemmerRep, grid: FieldGrid) -> CurrentGrid:
    """Vectorized currents at every grid point."""
    if rep.mode != FLOAT:
        raise ModeError("grid currents require a float-mode representation")
    if grid.kind != WAVEFUNCTION:
        raise ShapeError("grid currents require a wavefunction grid")
    phi = grid.values
    B = np.stack(rep.beta)
    BD = np.stack(rep.beta_dot)
    BB = np.einsum("mab,nbc->mnac", B, B)
    pb = np.einsum("...a,ab->...b", phi.conj(), rep.eta)
    pt = np.einsum("...a,ab->...b", phi, rep.eta)
    S = np.einsum("...a,...a->...", pb, phi).real
    Sflat = np.einsum("...a,ab,...b->...", pb, rep.beta_sq, phi).real
    J = np.einsum("...a,mab,...b->...m", pb, B, phi).real
    H = np.einsum("...a,mab,...b->...m", pb, BD, phi)
    K = np.einsum("...a,mnab,...b->...mn", pb, BB, phi)
    tS = np.einsum("...a,...a->...", pt, phi)
    tSflat = np.einsum("...a,ab,...b->...", pt, rep.beta_sq, phi)
    tJ = np.einsum("...a,mab,...b->...m", pt, B, phi)
    tK = np.einsum("...a,mnab,...b->...mn", pt, BB, phi)
    return CurrentGrid(
        extents=grid.extents,
        spacing=grid.spacing,
        S=S,
        Sflat=Sflat,
        Z=S - Sflat,
        J=J,
        H=H,
        K=K,
        tilde_S=tS,
        tilde_Sflat=tSflat,
        tilde_Z=tS - tSflat,
        tilde_J=tJ,
        tilde_K=tK,
    )
