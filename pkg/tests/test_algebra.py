from fractions import Fraction

import numpy as np
import pytest

from dkp5 import (
    IdentityCheck,
    enumerate_basis,
    minkowski_dot,
    raise_index,
    representation_from_betas,
    verify_algebra_identities,
)
from dkp5.errors import RepresentationDefectError
from dkp5.scalars import is_exact_zero


def _all_zero(mat):
    return all(is_exact_zero(x) for x in np.asarray(mat).reshape(-1))


def test_reference_rep_derived_elements(exact_rep):
    bsq = exact_rep.beta_sq
    assert [bsq[i, i] for i in range(5)] == [1, 1, 1, 1, 4]
    assert _all_zero(bsq - np.diag([Fraction(x) for x in (1, 1, 1, 1, 4)]))
    zeta = exact_rep.zeta
    assert [zeta[i, i] for i in range(5)] == [0, 0, 0, 0, -3]
    eta = exact_rep.eta
    assert [eta[i, i] for i in range(5)] == [1, -1, -1, -1, 1]
    assert _all_zero(eta - (2 * (exact_rep.beta[0] @ exact_rep.beta[0]) - exact_rep.identity))


def test_zeta_is_scaled_projection(exact_rep):
    zeta = exact_rep.zeta
    assert _all_zero(zeta @ zeta + 3 * zeta)
    proj = zeta * Fraction(-1, 3)
    assert _all_zero(proj @ proj - proj)


def test_all_identity_families_exact(exact_rep):
    checks = verify_algebra_identities(exact_rep)
    assert len(checks) == 11
    for c in checks:
        assert isinstance(c, IdentityCheck)
        assert c.exact_zero and c.passed and c.max_abs == 0.0
    by_name = {c.name: c for c in checks}
    assert by_name["defining_trilinear"].cases == 64
    assert by_name["quartic_reduction"].cases == 256


def test_all_identity_families_float(float_rep):
    checks = verify_algebra_identities(float_rep, tol=1e-12)
    assert all(c.passed for c in checks)
    assert max(c.max_abs for c in checks) < 1e-13


def test_trace_values(exact_rep):
    b = exact_rep.beta
    assert np.trace(b[0] @ b[0]) == 2
    assert np.trace(b[1] @ b[1]) == -2
    assert np.trace(b[0] @ b[1]) == 0
    bd = exact_rep.beta_dot
    assert np.trace(bd[0] @ bd[0]) == -2


def test_corrupt_rep_flags_failures(exact_rep):
    betas = list(exact_rep.beta)
    betas[1] = 0 * betas[1]
    rep = representation_from_betas(betas, "exact")
    checks = {c.name: c for c in verify_algebra_identities(rep)}
    assert not checks["defining_trilinear"].passed
    # the surviving eta_1_1 * b_0 term makes (mu, rho, nu) = (1, 1, 0) fail
    b, g = rep.beta, (1, -1, -1, -1)
    resid = b[1] @ b[1] @ b[0] + b[0] @ b[1] @ b[1] - g[1] * b[0]
    assert not _all_zero(resid)


def test_basis_rank_25(exact_rep, float_rep):
    mats, rank = enumerate_basis(exact_rep)
    assert rank == 25 and len(mats) == 25
    _, rank_f = enumerate_basis(float_rep)
    assert rank_f == 25


def test_degenerate_rep_rank_error(exact_rep):
    betas = [0 * b for b in exact_rep.beta]
    rep = representation_from_betas(betas, "exact")
    with pytest.raises(RepresentationDefectError) as exc:
        enumerate_basis(rep)
    assert exc.value.rank == 1


def test_minkowski_helpers():
    u = np.array([1.0, 2.0, 3.0, 4.0])
    assert minkowski_dot(u, u) == 1 - 4 - 9 - 16
    assert np.allclose(raise_index(u), [1.0, -2.0, -3.0, -4.0])


def test_malformed_rep_raises(exact_rep):
    import dataclasses

    from dkp5.errors import ModeError

    bad = dataclasses.replace(exact_rep, beta_sq=np.zeros((4, 4)))
    with pytest.raises(ModeError):
        verify_algebra_identities(bad)
    with pytest.raises(ModeError):
        enumerate_basis(bad)
