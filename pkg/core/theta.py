# core/theta.py
import logging
from typing import Optional
import numpy as np
from config.settings import settings
from core.entities import BZGrid, JetFrameField, ModularParameter, ThetaBasis
from core.torus import grid_z
from util.enums import ErrorMessage
from util.errors import InputError, ResolutionError
from util.timing import timed

logger = logging.getLogger(__name__)

MAX_ORDER = 8
_TAIL_TERMS = np.arange(64, dtype=float)


def series_cutoff(
    imag_T: float,
    max_abs_imag_v: float,
    order: int,
    tol: float = settings.THETA_TOL,
    max_cutoff: int = settings.THETA_MAX_CUTOFF,
) -> int:
    """
    Smallest M such that every term with |n+a| > M contributes less than `tol` in total.

    Term moduli (with the derivative factor) are bounded by exp(g(r)),
    g(r) = −π Im T r² + 2π |Im v| r + order·log(2π r), decreasing beyond its peak.
    """
    y = float(max_abs_imag_v)
    m = max(1, int(np.ceil(y / imag_T)) + 1)
    while m <= max_cutoff:
        slope = -2.0 * np.pi * imag_T * m + 2.0 * np.pi * y + order / m
        if slope < 0:
            r = m + _TAIL_TERMS
            g = -np.pi * imag_T * r**2 + 2.0 * np.pi * y * r + order * np.log(2 * np.pi * r)
            with np.errstate(over="ignore", under="ignore"):
                tail = 2.0 * float(np.sum(np.exp(g)))
            if tail < tol:
                return m
        m += 1
    raise ResolutionError(
        ErrorMessage.THETA_CUTOFF,
        f"tol={tol:g} needs M > {max_cutoff} (Im T={imag_T:g}, |Im v|<={y:g}, order={order})",
    )


def _theta_sum(a: float, b: float, v: np.ndarray, T: complex, order: int, m: int) -> np.ndarray:
    n = np.arange(-m - 1, m + 2, dtype=float)
    r = n + a
    r = r[np.abs(r) <= m]
    rr = r.reshape((-1,) + (1,) * v.ndim)
    terms = np.exp(1j * np.pi * rr**2 * T + 2j * np.pi * rr * (v + b))
    step = 2j * np.pi * rr
    factor = np.ones_like(step)
    out = np.empty((order + 1,) + v.shape, dtype=complex)
    for c in range(order + 1):
        out[c] = np.sum(factor * terms, axis=0)
        factor = factor * step
    return out


def theta_eval(
    a: float,
    b: float,
    v,
    T: complex,
    order: int = 0,
    tol: float = settings.THETA_TOL,
    max_cutoff: int = settings.THETA_MAX_CUTOFF,
) -> np.ndarray:
    """
    ∂^c/∂v^c θ[a,b](v,T) for c = 0…order, by term-wise differentiation of
    Σ_n exp(πi(n+a)²T + 2πi(n+a)(v+b)).

    Returns shape (order+1,) + shape(v).
    """
    T = complex(T)
    if T.imag <= 0:
        raise InputError(ErrorMessage.INVALID_TAU, f"Im(T)={T.imag:g}")
    if not 0 <= order <= MAX_ORDER:
        raise InputError(ErrorMessage.INVALID_ORDER, f"order={order} (max {MAX_ORDER})")
    v = np.asarray(v, dtype=complex)
    y = float(np.max(np.abs(v.imag))) if v.size else 0.0
    m = series_cutoff(T.imag, y, order, tol, max_cutoff)
    return _theta_sum(a, b, v, T, order, m)


def make_basis(
    tau: ModularParameter,
    n_bands: int,
    tol: float = settings.THETA_TOL,
    max_cutoff: int = settings.THETA_MAX_CUTOFF,
) -> ThetaBasis:
    if n_bands < 3:
        raise InputError(ErrorMessage.INVALID_CONFIG, f"N={n_bands} (need N >= 3)")
    chars = [(j / n_bands, 0.0) for j in range(n_bands)]
    big_t = n_bands * tau.imag
    m = series_cutoff(big_t, big_t, n_bands - 1, tol, max_cutoff)
    logger.debug("theta.basis N=%d tau=%s M=%d", n_bands, tau.tau, m)
    return ThetaBasis(tau=tau, n_bands=n_bands, characteristics=chars, truncation=m, tol=tol)


def lift_values(basis: ThetaBasis, z, order: int = 0) -> np.ndarray:
    """
    Lift f̃(z) and its z-jets at arbitrary points.
    Component j is θ[j/N,0](Nz, Nτ); each z-derivative carries the inner factor N.

    Returns shape(z) + (N, order+1).
    """
    n_bands = basis.n_bands
    z = np.asarray(z, dtype=complex)
    big_t = n_bands * basis.tau.tau
    chain = float(n_bands) ** np.arange(order + 1)
    out = np.empty(z.shape + (n_bands, order + 1), dtype=complex)
    for j, (a, b) in enumerate(basis.characteristics):
        vals = theta_eval(a, b, n_bands * z, big_t, order, basis.tol)
        out[..., j, :] = np.moveaxis(vals, 0, -1) * chain
    return out


def _check_lift(frames: np.ndarray) -> None:
    if not np.all(np.isfinite(frames)):
        raise ResolutionError(ErrorMessage.ZERO_LIFT, "non-finite lift values")
    col0 = np.linalg.norm(frames[..., 0], axis=-1)
    if np.min(col0) <= np.finfo(float).tiny:
        i1, i2 = np.unravel_index(np.argmin(col0), col0.shape)
        raise ResolutionError(ErrorMessage.ZERO_LIFT, f"at grid index ({i1}, {i2})")


def embedding_lift(
    basis: ThetaBasis,
    grid: BZGrid,
    order: Optional[int] = None,
    shift: complex = 0j,
    twist: Optional[np.ndarray] = None,
) -> JetFrameField:
    """
    Jets of the degree-N lift on the grid, z = k1 + τk2 (+ shift).
    `twist` applies a constant invertible matrix, giving σ∘f.
    """
    n_bands = basis.n_bands
    order = n_bands - 1 if order is None else order
    if not 0 <= order <= n_bands - 1:
        raise InputError(ErrorMessage.INVALID_ORDER, f"order={order} (N={n_bands})")
    with timed(logger, "theta.lift", n=grid.n, N=n_bands, order=order):
        z = grid_z(grid, basis.tau) + shift
        frames = lift_values(basis, z, order)
        if twist is not None:
            twist = np.asarray(twist, dtype=complex)
            if twist.shape != (n_bands, n_bands):
                raise InputError(ErrorMessage.SHAPE_MISMATCH, f"twist shape={twist.shape}")
            frames = np.einsum("ab,...bc->...ac", twist, frames)
        _check_lift(frames)
    return JetFrameField(grid=grid, order=order, frames=frames)


def quasiperiod_factor(basis: ThetaBasis, z) -> complex:
    """μ(z) = exp(−πiNτ − 2πiNz), with f̃(z+τ) = μ(z)·f̃(z)."""
    n_bands = basis.n_bands
    return np.exp(-1j * np.pi * n_bands * basis.tau.tau - 2j * np.pi * n_bands * np.asarray(z))


def translated_section_lift(basis: ThetaBasis, grid: BZGrid, c: complex) -> JetFrameField:
    """
    Order-0 lift built from translated sections of the same line bundle:
    s_j(z) = θ(z − c_j)^{N−1}·θ(z + (N−1)c_j), c_j = c + j/N, θ = θ[0,0](·, τ).

    The shifts of each product sum to zero, so every s_j has the automorphy μ(z) of
    the theta basis and the pair is related by a constant GL(N) matrix.
    """
    n_bands = basis.n_bands
    tau = basis.tau.tau
    z = grid_z(grid, basis.tau)
    frames = np.empty(z.shape + (n_bands, 1), dtype=complex)
    with timed(logger, "theta.translated", n=grid.n, N=n_bands, c=complex(c)):
        for j in range(n_bands):
            cj = c + j / n_bands
            lead = theta_eval(0.0, 0.0, z - cj, tau, 0, basis.tol)[0]
            tail = theta_eval(0.0, 0.0, z + (n_bands - 1) * cj, tau, 0, basis.tol)[0]
            frames[..., j, 0] = lead ** (n_bands - 1) * tail
        _check_lift(frames)
    return JetFrameField(grid=grid, order=0, frames=frames)
