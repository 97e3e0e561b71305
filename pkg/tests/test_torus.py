# tests/test_torus.py
import numpy as np
import pytest
from core.entities import BZGrid, ModularParameter, PeriodicScalarField, TwoFormField
from core.torus import (
    d_z_array,
    d_zbar_array,
    degree,
    derivative_array,
    grid_z,
    integrate_two_form,
    laplacian_z,
    laplacian_z_array,
    spectral_derivative,
)
from util.errors import InputError

TAU = ModularParameter(complex(0.3, 0.8))


def _wave(n: int, a: int, b: int) -> np.ndarray:
    k1, k2 = BZGrid(n).mesh()
    return np.exp(2j * np.pi * (a * k1 + b * k2))


def test_grid_rejects_tiny_and_nonpositive_tau():
    with pytest.raises(InputError):
        BZGrid(2)
    with pytest.raises(InputError):
        ModularParameter(complex(0.2, -1.0))


def test_grid_z_layout():
    grid = BZGrid(8)
    z = grid_z(grid, TAU)
    assert z[0, 0] == 0
    assert z[1, 0] == pytest.approx(1 / 8)
    assert z[0, 1] == pytest.approx(TAU.tau / 8)


def test_derivative_of_sine_is_exact():
    grid = BZGrid(32)
    k1, k2 = grid.mesh()
    f = PeriodicScalarField(grid=grid, values=np.sin(2 * np.pi * 3 * k1) * np.cos(2 * np.pi * k2))
    d1 = spectral_derivative(f, "k1").values
    expected = 6 * np.pi * np.cos(2 * np.pi * 3 * k1) * np.cos(2 * np.pi * k2)
    assert np.isrealobj(d1)
    np.testing.assert_allclose(d1, expected, atol=1e-10)


def test_second_derivative_along_k2():
    grid = BZGrid(16)
    _, k2 = grid.mesh()
    values = np.cos(2 * np.pi * 2 * k2)
    out = derivative_array(values, 1, order=2)
    np.testing.assert_allclose(out, -(4 * np.pi) ** 2 * values, atol=1e-9)


def test_laplacian_symbol_on_plane_wave():
    a, b = 2, -1
    e = _wave(32, a, b)
    symbol = TAU.abs2 * a**2 - 2 * TAU.real * a * b + b**2
    expected = -4 * np.pi**2 * symbol / TAU.imag**2 * e
    np.testing.assert_allclose(laplacian_z_array(e, TAU), expected, atol=1e-8)


def test_wirtinger_derivatives_factor_the_laplacian():
    e = _wave(32, 1, 3)
    lap = laplacian_z_array(e, TAU)
    np.testing.assert_allclose(4 * d_z_array(d_zbar_array(e, TAU), TAU), lap, atol=1e-8)


def test_operators_carry_trailing_axes():
    grid = BZGrid(16)
    k1, _ = grid.mesh()
    stacked = np.stack([np.sin(2 * np.pi * k1), np.cos(2 * np.pi * k1)], axis=-1)
    out = laplacian_z_array(stacked, ModularParameter(1j))
    np.testing.assert_allclose(out, -(2 * np.pi) ** 2 * stacked, atol=1e-9)
    field = laplacian_z(PeriodicScalarField(grid=grid, values=stacked[..., 0]), ModularParameter(1j))
    np.testing.assert_allclose(field.values, out[..., 0])


def test_integration_and_degree():
    grid = BZGrid(16)
    k1, k2 = grid.mesh()
    assert integrate_two_form(TwoFormField(grid=grid, w=np.full((16, 16), 2.5))) == pytest.approx(2.5)
    wave = TwoFormField(grid=grid, w=np.sin(2 * np.pi * k1) * np.cos(4 * np.pi * k2))
    assert abs(integrate_two_form(wave)) < 1e-15
    assert degree(TwoFormField(grid=grid, w=np.full((16, 16), np.pi))) == pytest.approx(1.0)


def test_shape_errors():
    with pytest.raises(InputError):
        derivative_array(np.zeros((4, 5)), 0)
    with pytest.raises(InputError):
        derivative_array(np.zeros((2, 2)), 0)
    with pytest.raises(InputError):
        spectral_derivative(PeriodicScalarField(grid=BZGrid(4), values=np.zeros((4, 4))), "k3")


def _bump(n: int) -> np.ndarray:
    k1, k2 = BZGrid(n).mesh()
    return np.exp(np.cos(2 * np.pi * k1) + 0.5 * np.sin(2 * np.pi * (k1 + 2 * k2)))


def test_derivatives_of_periodic_fields_integrate_to_zero():
    f = _bump(32)
    for values in (derivative_array(f, 0), derivative_array(f, 1), laplacian_z_array(f, TAU)):
        assert abs(np.mean(values)) < 1e-12 * np.max(np.abs(values))


def test_laplacian_is_symmetric():
    f = _bump(32)
    k1, k2 = BZGrid(32).mesh()
    g = np.cos(2 * np.pi * (2 * k1 - k2)) + np.sin(2 * np.pi * k2) ** 2
    lhs = float(np.real(np.mean(f * laplacian_z_array(g, TAU))))
    rhs = float(np.real(np.mean(laplacian_z_array(f, TAU) * g)))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_laplacian_commutes_with_grid_translations():
    f = _bump(32)
    shifted = np.roll(f, (3, -5), axis=(0, 1))
    np.testing.assert_allclose(
        laplacian_z_array(shifted, TAU),
        np.roll(laplacian_z_array(f, TAU), (3, -5), axis=(0, 1)),
        atol=1e-10 * np.max(np.abs(laplacian_z_array(f, TAU))),
    )
