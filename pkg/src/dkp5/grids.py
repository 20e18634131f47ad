"""Rectangular 4D lattices of field values, their file format and stencils.

A grid has four axes (t, x, y, z), per-axis spacing in natural units,
and a per-point payload of one of four kinds, identified by the number
of complex components it carries: 1 (scalar), 4 (four-vector), 5
(wavefunction) or 16 (rank-2 tensor, stored row-major).  Axes of extent
1 are symmetry axes: the field is constant along them and derivatives
along them are exactly zero.

File format (little-endian, self-describing, bit-exact round trip):

    magic   "DKP5"            4 bytes
    version u32 = 1
    kind    u8  (components per point)
    extents 4 x u64           slowest axis first (t)
    spacing 4 x f64
    payload f64 pairs (re, im), row-major, component index fastest

Derivatives use second-order central differences in the interior and
the one-sided stencil (-3 f0 + 4 f1 - f2) / 2h at the two boundary
layers; both are exact on quadratics.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import GridFormatError, ShapeError, StencilError

SCALAR = 1
FOUR_VECTOR = 4
WAVEFUNCTION = 5
TENSOR2 = 16

_KIND_TRAILING = {
    SCALAR: (),
    FOUR_VECTOR: (4,),
    WAVEFUNCTION: (5,),
    TENSOR2: (4, 4),
}

_MAGIC = b"DKP5"
_VERSION = 1
_HEADER = struct.Struct("<4sIB4Q4d")


@dataclass
class FieldGrid:
    """Lattice of per-point payloads; values shape is extents + payload shape."""

    extents: tuple
    spacing: tuple
    kind: int
    values: np.ndarray

    def __post_init__(self):
        self.extents = tuple(int(n) for n in self.extents)
        self.spacing = tuple(float(h) for h in self.spacing)
        if len(self.extents) != 4 or len(self.spacing) != 4:
            raise ShapeError("grids have exactly four axes")
        if any(n < 1 for n in self.extents):
            raise ShapeError(f"axis extents must be positive, got {self.extents}")
        if any(not h > 0 for h in self.spacing):
            raise ShapeError(f"axis spacings must be positive, got {self.spacing}")
        if self.kind not in _KIND_TRAILING:
            raise ShapeError(f"unknown payload kind {self.kind}")
        want = self.extents + _KIND_TRAILING[self.kind]
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != want:
            raise ShapeError(f"values shape {self.values.shape}, want {want}")

    @classmethod
    def zeros(cls, extents, spacing, kind):
        shape = tuple(extents) + _KIND_TRAILING[kind]
        return cls(tuple(extents), tuple(spacing), kind, np.zeros(shape, dtype=complex))

    @property
    def n_points(self):
        return int(np.prod(self.extents))

    def same_shape_as(self, other):
        return self.extents == other.extents and self.spacing == other.spacing


def coordinate_axes(extents, spacing):
    """Per-axis coordinate arrays; the grid origin sits at 0."""
    return [np.arange(n) * h for n, h in zip(extents, spacing)]


def store_grid(grid: FieldGrid, path):
    header = _HEADER.pack(
        _MAGIC, _VERSION, grid.kind, *grid.extents, *grid.spacing
    )
    payload = np.ascontiguousarray(grid.values, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def load_grid(path) -> FieldGrid:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise GridFormatError(
            f"file too short for header ({len(raw)} < {_HEADER.size} bytes)", offset=len(raw)
        )
    magic, version, kind, n0, n1, n2, n3, h0, h1, h2, h3 = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise GridFormatError(f"bad magic {magic!r}, want {_MAGIC!r}", offset=0)
    if version != _VERSION:
        raise GridFormatError(f"unsupported version {version}", offset=4)
    if kind not in _KIND_TRAILING:
        raise GridFormatError(f"unknown payload kind {kind}", offset=8)
    extents = (n0, n1, n2, n3)
    for i, n in enumerate(extents):
        if n == 0:
            raise GridFormatError(f"axis {i} has extent 0", offset=9 + 8 * i)
    spacing = (h0, h1, h2, h3)
    for i, h in enumerate(spacing):
        if not h > 0 or not np.isfinite(h):
            raise GridFormatError(f"axis {i} has spacing {h}", offset=41 + 8 * i)
    n_values = int(np.prod(extents)) * kind
    expected = n_values * 16
    got = len(raw) - _HEADER.size
    if got != expected:
        raise GridFormatError(
            f"payload has {got} bytes, want {expected}", offset=_HEADER.size + min(got, expected)
        )
    values = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).astype(complex)
    values = values.reshape(extents + _KIND_TRAILING[kind])
    return FieldGrid(extents, spacing, kind, values)


def stencil_derivative(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order first derivative of an array along one axis.

    Requires at least 3 samples along the axis; symmetry axes are handled
    by the callers, which return zeros without touching the stencil.
    """
    v = np.moveaxis(values, axis, 0)
    if v.shape[0] < 3:
        raise StencilError(
            f"axis {axis} has extent {v.shape[0]}; need >= 3 for the stencil"
        )
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def array_derivative(values, extents, spacing, axis):
    """Derivative of a grid-shaped array, honouring symmetry axes."""
    if extents[axis] == 1:
        return np.zeros_like(values)
    return stencil_derivative(values, axis, spacing[axis])


def partial_derivative(grid: FieldGrid, axis: int) -> FieldGrid:
    """d/dx^axis of the field; exactly zero along symmetry axes."""
    if not 0 <= axis <= 3:
        raise ShapeError(f"axis {axis} outside 0..3")
    if grid.extents[axis] == 1:
        return FieldGrid.zeros(grid.extents, grid.spacing, grid.kind)
    out = stencil_derivative(grid.values, axis, grid.spacing[axis])
    return FieldGrid(grid.extents, grid.spacing, grid.kind, out)


def gradient(grid: FieldGrid):
    """All four partial derivatives, lower index."""
    return [partial_derivative(grid, axis) for axis in range(4)]


def _select(values, mask):
    a = np.abs(np.asarray(values))
    if mask is not None:
        keep = ~np.asarray(mask, dtype=bool)
        a = a[keep]
    return a


def max_abs(values, mask=None) -> float:
    """Max |value| over unmasked points (mask covers the four grid axes)."""
    a = _select(values, mask)
    return float(a.max()) if a.size else 0.0


def rms(values, mask=None) -> float:
    """Root-mean-square of |value| over unmasked points, row-major order."""
    a = _select(values, mask)
    if not a.size:
        return 0.0
    return float(np.sqrt(np.mean(np.square(a))))
