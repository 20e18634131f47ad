"""Symbolic reduction of generator words onto the 25-element basis.

A word (w1, ..., wn) denotes the matrix product b_{w1} ... b_{wn}.
Because the cubic rewrite

    b_lam b_mu b_nu = (eta_{lam mu} (b_nu - c_nu) + eta_{nu mu} (b_lam + c_lam)) / 2

(c_mu the companion generator) expresses any triple product on the
canonical basis {I; b_mu; c_mu; b_mu b_nu}, reduction proceeds by a
single left-to-right fold: keep a linear combination over the basis and
multiply one generator at a time through precomputed structure
constants.  The fold is linear, so it is confluent by construction; the
structure constants themselves are validated entry-by-entry against the
explicit matrices in the test suite.

Two right-multiplication tables are built at import time, one for
multiplying by b_nu and one for c_nu; together they also give products
of arbitrary basis combinations.  All coefficients are exact rationals,
no matrix arithmetic is involved.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import METRIC_DIAG, basis_matrices
from .errors import ModeError, WordIndexError
from .scalars import (
    EXACT,
    FLOAT,
    GaussianRational,
    check_mode,
    is_exact_zero,
    magnitude,
    to_complex,
)

N_BASIS = 25
IDX_I = 0


def idx_beta(mu):
    return 1 + mu


def idx_companion(mu):
    return 5 + mu


def idx_pair(mu, nu):
    return 9 + 4 * mu + nu


BASIS_LABELS = tuple(
    ["I"]
    + [f"b{m}" for m in range(4)]
    + [f"c{m}" for m in range(4)]
    + [f"b{m}b{n}" for m in range(4) for n in range(4)]
)

_HALF = Fraction(1, 2)
_TWO_THIRDS = Fraction(2, 3)

# b^2 expressed on the basis: eta^{rho rho} b_rho b_rho summed over rho.
_SQ_COMBO = tuple((idx_pair(r, r), Fraction(METRIC_DIAG[r])) for r in range(4))


def _add(d, idx, coeff):
    if coeff:
        d[idx] = d.get(idx, Fraction(0)) + coeff


def _cubic_combo(lam, mu, nu):
    """b_lam b_mu b_nu on the basis (the degree-3 rewrite)."""
    d = {}
    if lam == mu:
        s = _HALF * METRIC_DIAG[lam]
        _add(d, idx_beta(nu), s)
        _add(d, idx_companion(nu), -s)
    if nu == mu:
        s = _HALF * METRIC_DIAG[nu]
        _add(d, idx_beta(lam), s)
        _add(d, idx_companion(lam), s)
    return d


def _build_tables():
    right_beta = [[None] * 4 for _ in range(N_BASIS)]
    right_comp = [[None] * 4 for _ in range(N_BASIS)]
    for nu in range(4):
        right_beta[IDX_I][nu] = ((idx_beta(nu), Fraction(1)),)
        right_comp[IDX_I][nu] = ((idx_companion(nu), Fraction(1)),)
        for mu in range(4):
            # b_mu * b_nu is itself a basis element.
            right_beta[idx_beta(mu)][nu] = ((idx_pair(mu, nu), Fraction(1)),)

            # c_mu * b_nu = b_mu b_nu - (2/3) eta_{mu nu} (b^2 - I)
            d = {idx_pair(mu, nu): Fraction(1)}
            if mu == nu:
                s = _TWO_THIRDS * METRIC_DIAG[mu]
                for j, c in _SQ_COMBO:
                    _add(d, j, -s * c)
                _add(d, IDX_I, s)
            right_beta[idx_companion(mu)][nu] = tuple(d.items())

            # b_mu * c_nu = -b_mu b_nu + (2/3) eta_{mu nu} (b^2 - I)
            d = {idx_pair(mu, nu): Fraction(-1)}
            if mu == nu:
                s = _TWO_THIRDS * METRIC_DIAG[mu]
                for j, c in _SQ_COMBO:
                    _add(d, j, s * c)
                _add(d, IDX_I, -s)
            right_comp[idx_beta(mu)][nu] = tuple(d.items())

            # c_mu * c_nu = -b_mu b_nu
            right_comp[idx_companion(mu)][nu] = ((idx_pair(mu, nu), Fraction(-1)),)

        for lam in range(4):
            for mu in range(4):
                # (b_lam b_mu) * b_nu: the cubic rewrite verbatim.
                right_beta[idx_pair(lam, mu)][nu] = tuple(_cubic_combo(lam, mu, nu).items())

                # (b_lam b_mu) * c_nu = -b_lam b_mu b_nu + eta_{mu nu} (b_lam + c_lam)
                d = {j: -c for j, c in _cubic_combo(lam, mu, nu).items()}
                if mu == nu:
                    s = Fraction(METRIC_DIAG[mu])
                    _add(d, idx_beta(lam), s)
                    _add(d, idx_companion(lam), s)
                right_comp[idx_pair(lam, mu)][nu] = tuple(d.items())
    return right_beta, right_comp


RIGHT_BETA, RIGHT_COMPANION = _build_tables()


class BasisCombination:
    """Linear combination over the canonical 25-element basis."""

    __slots__ = ("coeffs", "mode")

    def __init__(self, coeffs, mode=EXACT):
        check_mode(mode)
        coeffs = list(coeffs)
        if len(coeffs) != N_BASIS:
            raise ValueError(f"expected {N_BASIS} coefficients, got {len(coeffs)}")
        if mode == EXACT:
            coeffs = [
                c if isinstance(c, GaussianRational) else GaussianRational(c)
                for c in coeffs
            ]
        else:
            coeffs = [complex(c) for c in coeffs]
        self.coeffs = coeffs
        self.mode = mode

    @classmethod
    def zero(cls, mode=EXACT):
        return cls([0] * N_BASIS, mode)

    @classmethod
    def unit(cls, idx, mode=EXACT):
        coeffs = [0] * N_BASIS
        coeffs[idx] = 1
        return cls(coeffs, mode)

    def nonzero(self):
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    def to_float(self):
        return BasisCombination([to_complex(c) for c in self.coeffs], FLOAT)

    def __eq__(self, other):
        if not isinstance(other, BasisCombination):
            return NotImplemented
        return self.mode == other.mode and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        terms = [f"{c}*{BASIS_LABELS[i]}" for i, c in self.nonzero()]
        return f"BasisCombination({' + '.join(terms) or '0'})"

    def to_json_obj(self):
        """Exact: 25 entries [num_re, den_re, num_im, den_im]; float: [re, im]."""
        if self.mode == EXACT:
            return [
                [c.re.numerator, c.re.denominator, c.im.numerator, c.im.denominator]
                for c in self.coeffs
            ]
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json_obj(cls, obj, mode=EXACT):
        if mode == EXACT:
            coeffs = [
                GaussianRational(Fraction(a, b), Fraction(c, d)) for a, b, c, d in obj
            ]
        else:
            coeffs = [complex(re, im) for re, im in obj]
        return cls(coeffs, mode)


def _fold(coeffs, table, nu):
    out = [Fraction(0)] * N_BASIS
    for i, c in enumerate(coeffs):
        if not c:
            continue
        for j, s in table[i][nu]:
            out[j] = out[j] + c * s
    return out


def reduce_word(word) -> BasisCombination:
    """Canonical basis expansion of b_{w1} ... b_{wn}, purely symbolically.

    The empty word reduces to the identity element.
    """
    word = list(word)
    for idx in word:
        if not isinstance(idx, (int, np.integer)) or not 0 <= idx <= 3:
            raise WordIndexError(f"generator index {idx!r} outside 0..3")
    acc = [Fraction(0)] * N_BASIS
    acc[IDX_I] = Fraction(1)
    for nu in word:
        acc = _fold(acc, RIGHT_BETA, nu)
    return BasisCombination(acc, EXACT)


def combination_product(c1: BasisCombination, c2: BasisCombination) -> BasisCombination:
    """Product of two basis combinations through the structure constants."""
    if c1.mode != EXACT or c2.mode != EXACT:
        raise ModeError("combination products are defined for exact mode")
    total = [GaussianRational(0)] * N_BASIS
    for j, cj in c2.nonzero():
        if j == IDX_I:
            part = list(c1.coeffs)
        elif 1 <= j <= 4:
            part = _fold(c1.coeffs, RIGHT_BETA, j - 1)
        elif 5 <= j <= 8:
            part = _fold(c1.coeffs, RIGHT_COMPANION, j - 5)
        else:
            mu, nu = divmod(j - 9, 4)
            part = _fold(_fold(c1.coeffs, RIGHT_BETA, mu), RIGHT_BETA, nu)
        total = [t + cj * p for t, p in zip(total, part)]
    return BasisCombination(total, EXACT)


def eval_basis_combination(rep, combo: BasisCombination, basis=None):
    """Sum of coefficients times basis matrices for the given representation."""
    if combo.mode != rep.mode:
        raise ModeError(
            f"combination mode {combo.mode!r} does not match representation mode {rep.mode!r}"
        )
    if basis is None:
        basis = basis_matrices(rep)
    if rep.mode == EXACT:
        out = np.full((5, 5), Fraction(0), dtype=object)
        for i, c in combo.nonzero():
            # Real coefficients stay in plain Fraction arithmetic.
            out = out + (c.re * basis[i] if not c.im else c * basis[i])
    else:
        out = np.zeros((5, 5), dtype=complex)
        for i, c in combo.nonzero():
            out = out + c * basis[i]
    return out


def word_matrix_product(rep, word):
    """Direct matrix product along the word; the reduction oracle."""
    out = rep.identity
    for nu in word:
        out = out @ rep.beta[nu]
    return out


def word_reduction_sweep(rep, max_len, tol=1e-12):
    """Check eval(reduce(w)) == product(w) for every word with 1 <= |w| <= max_len.

    Walks the word tree breadth-first so both the products and the folds
    reuse their length-(n-1) prefixes.  Returns (words_checked,
    mismatches, max_abs_residual).
    """
    basis = basis_matrices(rep)
    exact = rep.mode == EXACT
    words = 0
    mismatches = 0
    max_res = 0.0
    start = [Fraction(0)] * N_BASIS
    start[IDX_I] = Fraction(1)
    level = [(rep.identity, start)]
    for _ in range(max_len):
        nxt = []
        for prod, coeffs in level:
            for nu in range(4):
                p2 = prod @ rep.beta[nu]
                c2 = _fold(coeffs, RIGHT_BETA, nu)
                nxt.append((p2, c2))
                words += 1
                if exact:
                    combo = BasisCombination(c2, EXACT)
                else:
                    combo = BasisCombination([to_complex(c) for c in c2], FLOAT)
                diff = eval_basis_combination(rep, combo, basis=basis) - p2
                entries = diff.reshape(-1)
                if exact:
                    if any(not is_exact_zero(x) for x in entries):
                        mismatches += 1
                        max_res = max(max_res, max(magnitude(x) for x in entries))
                else:
                    r = max(magnitude(x) for x in entries)
                    max_res = max(max_res, r)
                    if r > tol:
                        mismatches += 1
        level = nxt
    return words, mismatches, max_res
