import struct

import numpy as np
import pytest

from dkp5 import (
    FOUR_VECTOR,
    SCALAR,
    TENSOR2,
    WAVEFUNCTION,
    FieldGrid,
    load_grid,
    max_abs,
    partial_derivative,
    rms,
    stencil_derivative,
    store_grid,
)
from dkp5.errors import GridFormatError, ShapeError, StencilError


def _random_grid(rng, extents, kind):
    shape = tuple(extents) + {SCALAR: (), FOUR_VECTOR: (4,), WAVEFUNCTION: (5,), TENSOR2: (4, 4)}[kind]
    vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return FieldGrid(extents, (0.1, 0.2, 0.3, 0.4), kind, vals)


@pytest.mark.parametrize("kind", [SCALAR, FOUR_VECTOR, WAVEFUNCTION, TENSOR2])
def test_round_trip_bit_exact(tmp_path, kind):
    rng = np.random.default_rng(kind)
    grid = _random_grid(rng, (3, 2, 4, 1), kind)
    path = tmp_path / "grid.dkp5"
    store_grid(grid, path)
    back = load_grid(path)
    assert back.extents == grid.extents
    assert back.spacing == grid.spacing
    assert back.kind == grid.kind
    assert np.array_equal(back.values, grid.values)
    # store-load-store reproduces the file byte for byte
    path2 = tmp_path / "grid2.dkp5"
    store_grid(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_bad_magic(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "g.dkp5"
    store_grid(_random_grid(rng, (2, 1, 1, 1), SCALAR), path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(GridFormatError) as exc:
        load_grid(path)
    assert exc.value.offset == 0


def test_bad_version(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "g.dkp5"
    store_grid(_random_grid(rng, (2, 1, 1, 1), SCALAR), path)
    raw = bytearray(path.read_bytes())
    raw[4:8] = struct.pack("<I", 99)
    path.write_bytes(bytes(raw))
    with pytest.raises(GridFormatError) as exc:
        load_grid(path)
    assert exc.value.offset == 4


def test_zero_extent(tmp_path):
    path = tmp_path / "g.dkp5"
    header = struct.pack("<4sIB4Q4d", b"DKP5", 1, 1, 2, 0, 1, 1, 0.1, 0.1, 0.1, 0.1)
    path.write_bytes(header)
    with pytest.raises(GridFormatError) as exc:
        load_grid(path)
    assert "extent 0" in str(exc.value)
    assert exc.value.offset == 9 + 8


def test_truncated_payload(tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "g.dkp5"
    store_grid(_random_grid(rng, (2, 2, 1, 1), FOUR_VECTOR), path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(GridFormatError):
        load_grid(path)


def test_unknown_kind(tmp_path):
    path = tmp_path / "g.dkp5"
    header = struct.pack("<4sIB4Q4d", b"DKP5", 1, 7, 1, 1, 1, 1, 0.1, 0.1, 0.1, 0.1)
    path.write_bytes(header + b"\x00" * 16 * 7)
    with pytest.raises(GridFormatError) as exc:
        load_grid(path)
    assert exc.value.offset == 8


def test_constructor_validation():
    with pytest.raises(ShapeError):
        FieldGrid((0, 1, 1, 1), (0.1,) * 4, SCALAR, np.zeros((0, 1, 1, 1)))
    with pytest.raises(ShapeError):
        FieldGrid((2, 1, 1, 1), (0.1, -0.1, 0.1, 0.1), SCALAR, np.zeros((2, 1, 1, 1)))
    with pytest.raises(ShapeError):
        FieldGrid((2, 1, 1, 1), (0.1,) * 4, FOUR_VECTOR, np.zeros((2, 1, 1, 1, 5)))


def test_constant_field_derivative_zero():
    grid = FieldGrid((5, 1, 1, 1), (0.1,) * 4, SCALAR, np.full((5, 1, 1, 1), 2.5 + 0j))
    d = partial_derivative(grid, 0)
    assert np.array_equal(d.values, np.zeros_like(d.values))


def test_quadratic_exact_everywhere():
    # both the central and one-sided stencils are exact on t^2
    n, h = 9, 0.37
    t = np.arange(n) * h
    vals = (t**2).reshape(n, 1, 1, 1).astype(complex)
    grid = FieldGrid((n, 1, 1, 1), (h, 1, 1, 1), SCALAR, vals)
    d = partial_derivative(grid, 0)
    want = (2 * t).reshape(n, 1, 1, 1)
    assert np.allclose(d.values, want, atol=1e-12)


def test_sine_convergence_second_order():
    def err(n, h):
        x = np.arange(n) * h
        vals = np.sin(x).reshape(1, n, 1, 1).astype(complex)
        grid = FieldGrid((1, n, 1, 1), (1, h, 1, 1), SCALAR, vals)
        d = partial_derivative(grid, 1)
        return np.max(np.abs(d.values[0, :, 0, 0] - np.cos(x)))

    h = 0.01
    e1 = err(101, h)
    e2 = err(201, h / 2)
    assert e1 <= 1.0 * h**2
    assert 3.5 <= e1 / e2 <= 4.5


def test_symmetry_axis_and_stencil_error():
    grid = FieldGrid((4, 1, 2, 1), (0.1,) * 4, SCALAR, np.ones((4, 1, 2, 1), dtype=complex))
    assert np.array_equal(partial_derivative(grid, 1).values, np.zeros((4, 1, 2, 1)))
    with pytest.raises(StencilError):
        partial_derivative(grid, 2)


def test_derivative_linearity():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((6, 1, 1, 1)) + 1j * rng.standard_normal((6, 1, 1, 1))
    b = rng.standard_normal((6, 1, 1, 1)) + 1j * rng.standard_normal((6, 1, 1, 1))
    h = 0.2
    lhs = stencil_derivative(2.0 * a + 3.0 * b, 0, h)
    rhs = 2.0 * stencil_derivative(a, 0, h) + 3.0 * stencil_derivative(b, 0, h)
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_cross_axis_stencils_commute():
    # stencils along different axes are tensor-product operators, so they
    # commute to round-off even on rough data
    rng = np.random.default_rng(3)
    vals = rng.standard_normal((5, 6, 1, 1)).astype(complex)
    d01 = stencil_derivative(stencil_derivative(vals, 0, 0.1), 1, 0.2)
    d10 = stencil_derivative(stencil_derivative(vals, 1, 0.2), 0, 0.1)
    assert np.max(np.abs(d01 - d10)) < 1e-12


def test_mixed_derivative_commutes_on_smooth_field():
    def mixed(n, h):
        t = (np.arange(n) * h).reshape(n, 1, 1, 1)
        x = (np.arange(n) * h).reshape(1, n, 1, 1)
        vals = np.broadcast_to(np.sin(t) * np.cos(2 * x), (n, n, 1, 1)).astype(complex)
        d01 = stencil_derivative(stencil_derivative(vals, 0, h), 1, h)
        d10 = stencil_derivative(stencil_derivative(vals, 1, h), 0, h)
        return np.max(np.abs(d01 - d10))

    assert mixed(12, 0.05) < 1e-12


def test_norm_helpers_masked():
    vals = np.array([[1.0, 2.0], [30.0, 4.0]]).reshape(2, 2, 1, 1)
    mask = np.zeros((2, 2, 1, 1), dtype=bool)
    mask[1, 0] = True
    assert max_abs(vals) == 30.0
    assert max_abs(vals, mask) == 4.0
    assert rms(vals, mask) == pytest.approx(np.sqrt((1 + 4 + 16) / 3))
    assert max_abs(vals, np.ones_like(mask)) == 0.0
