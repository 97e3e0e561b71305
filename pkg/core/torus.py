# core/torus.py
"""
Coordinates and spectral calculus on the periodic Brillouin-zone grid.

All operators act on arrays whose first two axes are the grid axes (k1, k2);
trailing axes (matrix entries, frame columns) are carried along untouched.
"""
from typing import Literal, Union
import numpy as np
from core.entities import BZGrid, ModularParameter, PeriodicScalarField, TwoFormField
from util.enums import ErrorMessage
from util.errors import InputError

Direction = Literal["k1", "k2"]
_AXIS = {"k1": 0, "k2": 1}


def to_complex(k1, k2, tau: ModularParameter):
    """z = k1 + τ·k2; broadcasts over arrays."""
    return k1 + tau.tau * k2


def grid_z(grid: BZGrid, tau: ModularParameter) -> np.ndarray:
    k1, k2 = grid.mesh()
    return to_complex(k1, k2, tau)


def wavenumbers(n: int, drop_nyquist: bool = False) -> np.ndarray:
    m = np.fft.fftfreq(n, d=1.0 / n)
    if drop_nyquist and n % 2 == 0:
        m[n // 2] = 0.0
    return m


def _check(values: np.ndarray) -> int:
    if values.ndim < 2 or values.shape[0] != values.shape[1]:
        raise InputError(ErrorMessage.SHAPE_MISMATCH, f"shape={values.shape}")
    n = values.shape[0]
    if n < 4:
        raise InputError(ErrorMessage.GRID_TOO_SMALL, f"n={n} (need n >= 4)")
    return n


def _expand(mult: np.ndarray, ndim: int) -> np.ndarray:
    return mult.reshape(mult.shape + (1,) * (ndim - 2))


def _apply(values: np.ndarray, mult: np.ndarray) -> np.ndarray:
    spec = np.fft.fft2(values, axes=(0, 1))
    out = np.fft.ifft2(spec * _expand(mult, values.ndim), axes=(0, 1))
    return out.real if np.isrealobj(values) else out


def derivative_array(values: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
    """
    Fourier-multiplier derivative (2πi m)^order along grid axis 0 (k1) or 1 (k2).
    Odd orders drop the Nyquist mode so real input stays real.
    """
    n = _check(values)
    m = wavenumbers(n, drop_nyquist=order % 2 == 1)
    factor = (2j * np.pi * m) ** order
    ones = np.ones(n)
    mult = np.outer(factor, ones) if axis == 0 else np.outer(ones, factor)
    return _apply(values, mult)


def laplacian_z_array(values: np.ndarray, tau: ModularParameter) -> np.ndarray:
    """
    Δ_z = 4∂_z∂_z̄ = (|τ|²∂1² − 2Re τ ∂1∂2 + ∂2²)/(Im τ)², applied spectrally.
    """
    n = _check(values)
    m = wavenumbers(n)
    mo = wavenumbers(n, drop_nyquist=True)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    o1, o2 = np.meshgrid(mo, mo, indexing="ij")
    symbol = tau.abs2 * m1**2 - 2.0 * tau.real * o1 * o2 + m2**2
    mult = -4.0 * np.pi**2 * symbol / tau.imag**2
    return _apply(values, mult)


def d_z_array(values: np.ndarray, tau: ModularParameter) -> np.ndarray:
    """∂_z = (τ̄∂1 − ∂2)/(τ̄ − τ)."""
    t = tau.tau
    d1 = derivative_array(values.astype(complex), 0)
    d2 = derivative_array(values.astype(complex), 1)
    return (np.conj(t) * d1 - d2) / (np.conj(t) - t)


def d_zbar_array(values: np.ndarray, tau: ModularParameter) -> np.ndarray:
    """∂_z̄ = (τ∂1 − ∂2)/(τ − τ̄)."""
    t = tau.tau
    d1 = derivative_array(values.astype(complex), 0)
    d2 = derivative_array(values.astype(complex), 1)
    return (t * d1 - d2) / (t - np.conj(t))


def spectral_derivative(
    field: PeriodicScalarField, direction: Direction
) -> PeriodicScalarField:
    if direction not in _AXIS:
        raise InputError(ErrorMessage.SHAPE_MISMATCH, f"direction={direction!r}")
    return PeriodicScalarField(
        grid=field.grid, values=derivative_array(field.values, _AXIS[direction])
    )


def laplacian_z(field: PeriodicScalarField, tau: ModularParameter) -> PeriodicScalarField:
    return PeriodicScalarField(
        grid=field.grid, values=laplacian_z_array(field.values, tau)
    )


def integrate_two_form(form: Union[TwoFormField, PeriodicScalarField]) -> float:
    """
    ∫ w dk1∧dk2 over the unit square: the grid mean, summed in a fixed order.
    """
    w = form.w if isinstance(form, TwoFormField) else form.values
    n = w.shape[0]
    # row sums first, then the column of partial sums: fixed reduction order
    return float(np.sum(np.sum(np.real(w), axis=1)) / (n * n))


def degree(form: TwoFormField) -> float:
    """(1/π)∫ω, the degree in the fixed Fubini–Study normalization."""
    return integrate_two_form(form) / np.pi
