"""Scalar arithmetic for the two computation modes.

Every computation in the package runs in one of two fixed scalar modes:

* ``exact``: Gaussian rationals, i.e. complex numbers whose real and
  imaginary parts are arbitrary-precision :class:`fractions.Fraction`
  values.  Arithmetic is closed, there is no rounding, and equality
  against zero is decidable, so identity checks can assert exact zeros.
* ``float``: ordinary double-precision complex numbers.  Comparisons go
  through an explicit tolerance, never implicit equality.

Exact matrices are numpy object arrays whose entries are ``Fraction``
(real matrices) or :class:`GaussianRational` (complex ones); numpy's
``dot``, ``trace``, ``outer`` and friends work through the operator
protocol, so the same linear-algebra code serves both modes.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


def as_fraction(x) -> Fraction:
    """Exact conversion to Fraction with pure Python integer internals.

    numpy integers are converted through int so their fixed-width
    arithmetic can never leak into (and silently overflow) an exact
    computation; floats are rejected outright.
    """
    if isinstance(x, Fraction):
        # Re-box fractions whose internals are numpy integers.
        if type(x.numerator) is int and type(x.denominator) is int:
            return x
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, float):
        raise TypeError(f"float {x!r} is not exact; use Fraction or int")
    return Fraction(x)


class GaussianRational:
    """Exact complex scalar with Fraction real and imaginary parts.

    Mixes freely with ``int`` and ``Fraction`` operands.  Floats are
    deliberately rejected so that a float sneaking into an exact
    computation fails loudly instead of silently degrading it.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    @classmethod
    def _fast(cls, re, im):
        # Internal constructor for operands already known to be Fractions.
        out = object.__new__(cls)
        out.re = re
        out.im = im
        return out

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction, numbers.Integral)):
            return GaussianRational(x)
        return None

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._fast(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            return GaussianRational._fast(self.re + other, self.im)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + o

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._fast(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            return GaussianRational._fast(self.re - other, self.im)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self - o

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational._fast(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            # Sparse matrices make zero and real factors the common case.
            if not b:
                if not a:
                    return _GR_ZERO
                return GaussianRational._fast(a * c, a * d)
            if not d:
                if not c:
                    return _GR_ZERO
                return GaussianRational._fast(a * c, b * c)
            return GaussianRational._fast(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            if not other:
                return _GR_ZERO
            return GaussianRational._fast(self.re * other, self.im * other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n2 = o.re * o.re + o.im * o.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational._fast(
            (self.re * o.re + self.im * o.im) / n2,
            (self.im * o.re - self.re * o.im) / n2,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational._fast(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        """Exact squared magnitude."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(float(self.re), float(self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else ''}{self.im}i)"


_GR_ZERO = GaussianRational(0)


def check_mode(mode):
    if mode not in MODES:
        from .errors import ModeError

        raise ModeError(f"unknown scalar mode {mode!r}; expected one of {MODES}")
    return mode


def frac(num, den, mode):
    """The rational num/den in the given mode's scalar type."""
    return Fraction(num, den) if mode == EXACT else num / den


def magnitude(x) -> float:
    """Absolute value of a scalar of either mode, as a float."""
    if isinstance(x, GaussianRational):
        return abs(x)
    if isinstance(x, Fraction):
        return abs(float(x))
    return abs(x)


def is_exact_zero(x) -> bool:
    if isinstance(x, GaussianRational):
        return not x
    return x == 0


def to_complex(x) -> complex:
    if isinstance(x, (GaussianRational, Fraction)):
        return complex(x)
    return complex(x)


def random_rational(rng, bound=9) -> Fraction:
    """Small random Fraction with numerator in [-bound, bound]."""
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_gaussian_rational(rng, bound=9) -> GaussianRational:
    return GaussianRational(random_rational(rng, bound), random_rational(rng, bound))


def random_exact_wavefunction(rng, bound=9):
    """Five random Gaussian rationals, the exact-mode test workhorse."""
    return [random_gaussian_rational(rng, bound) for _ in range(5)]
