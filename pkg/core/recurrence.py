# core/recurrence.py
import logging
from typing import Dict, List, Optional
import numpy as np
from config.settings import settings
from core.entities import (
    ModularParameter,
    OrthoFrameField,
    ReconstructedSequence,
    RecurrenceReport,
    TwoFormField,
)
from core.geometry import associated_two_form
from core.theta import theta_eval
from core.torus import degree, laplacian_z_array
from util.enums import ErrorMessage
from util.errors import InputError, ResolutionError
from util.timing import timed

logger = logging.getLogger(__name__)

# relative size of the hyperflex density below which a grid point is on the divisor
HYPERFLEX_HIT = 1e-10


def ricci_form(
    w: TwoFormField, tau: ModularParameter, floor: float = settings.POSITIVITY_FLOOR
) -> TwoFormField:
    """
    Ric ω = (i/2)∂∂̄ log λ for ω = λ·(i/2)dz∧dz̄, i.e. coefficient (Im τ/4)·Δ_z log(W/Im τ).
    W must be strictly positive (relative floor against its max).
    """
    values = w.w
    peak = float(np.max(np.abs(values)))
    low = float(np.min(values))
    if peak == 0.0 or low <= floor * peak:
        i1, i2 = np.unravel_index(np.argmin(values), values.shape)
        raise ResolutionError(
            ErrorMessage.NONPOSITIVE_FORM, f"min W={low:.3e} at grid index ({i1}, {i2})"
        )
    lap = laplacian_z_array(np.log(values / tau.imag), tau)
    return TwoFormField(grid=w.grid, w=0.25 * tau.imag * lap)


def two_form_sequence(frames: OrthoFrameField) -> List[TwoFormField]:
    """ω^(j) for j = −1…N−1 (list index j+1)."""
    return [associated_two_form(frames, j) for j in range(-1, frames.n_bands)]


def frenet_two_form(frames: OrthoFrameField, j: int, tau: ModularParameter) -> TwoFormField:
    """
    ω^(j) from Gram–Schmidt norms alone: Im τ·ν_{j+1}²/ν_j²
    (the classical |F_{j−1}|²|F_{j+1}|²/|F_j|⁴ with |F_j|² = Π_{i≤j} ν_i²).
    """
    if not 0 <= j <= frames.n_bands - 2:
        raise InputError(ErrorMessage.LEVEL_OUT_OF_RANGE, f"j={j} (N={frames.n_bands})")
    nu = frames.norms
    return TwoFormField(grid=frames.grid, w=tau.imag * nu[..., j + 1] ** 2 / nu[..., j] ** 2)


def top_ricci_form(frames: OrthoFrameField, tau: ModularParameter) -> TwoFormField:
    """
    Smooth part of Ric ω^(N−2).

    ω^(N−2) vanishes at the N² hyperflexes, where its Ricci form carries point masses.
    The smooth part is (Im τ/4)·Δ_z q − πN² with the periodic potential
    q = 2πN²(Im z)²/Im τ − log ν_{N−2}² − Σ_{k≤N−2} log ν_k².
    """
    n_bands = frames.n_bands
    nu2 = frames.norms[..., : n_bands - 1] ** 2
    _, k2 = frames.grid.mesh()
    y = tau.imag * k2
    q = (
        2.0 * np.pi * n_bands**2 * y**2 / tau.imag
        - np.log(nu2[..., -1])
        - np.sum(np.log(nu2), axis=-1)
    )
    ric = 0.25 * tau.imag * laplacian_z_array(q, tau) - np.pi * n_bands**2
    return TwoFormField(grid=frames.grid, w=ric)


def hyperflex_density(grid, tau: ModularParameter, n_bands: int) -> np.ndarray:
    """
    |s_H|²·exp(−2πN²(Im ζ)²/Im τ) with s_H = θ[1/2,1/2](Nζ, τ), ζ = z − (1+τ)/2.

    Periodic, smooth, and vanishing to second order exactly at the N² hyperflexes.
    The argument Nζ is reduced into the fundamental cell first; the density is
    invariant under that shift.
    """
    k1, k2 = grid.mesh()
    u1 = n_bands * (k1 - 0.5)
    u2 = n_bands * (k2 - 0.5)
    u1 = u1 - np.round(u1)
    u2 = u2 - np.round(u2)
    v = u1 + tau.tau * u2
    s = theta_eval(0.5, 0.5, v, tau.tau)[0]
    return np.abs(s) ** 2 * np.exp(-2.0 * np.pi * (tau.imag * u2) ** 2 / tau.imag)


def smooth_top_ricci_form(
    w: TwoFormField,
    tau: ModularParameter,
    n_bands: int,
    floor: float = settings.POSITIVITY_FLOOR,
) -> TwoFormField:
    """
    Smooth part of Ric ω^(N−2) computed from the form itself.

    ω^(N−2)/h is positive and periodic for h = hyperflex_density, so
    Ric_smooth = (Im τ/4)·Δ_z log(ω/h) − πN². On grid points that sit on a hyperflex
    the quotient is the limit Δω/Δh.
    """
    h = hyperflex_density(w.grid, tau, n_bands)
    on_divisor = h <= HYPERFLEX_HIT * float(np.max(h))
    ratio = np.empty_like(w.w)
    ratio[~on_divisor] = w.w[~on_divisor] / h[~on_divisor]
    if np.any(on_divisor):
        lap_w = laplacian_z_array(w.w, tau)
        lap_h = laplacian_z_array(h, tau)
        ratio[on_divisor] = lap_w[on_divisor] / lap_h[on_divisor]
    peak = float(np.max(np.abs(ratio)))
    low = float(np.min(ratio))
    if peak == 0.0 or low <= floor * peak:
        i1, i2 = np.unravel_index(np.argmin(ratio), ratio.shape)
        raise ResolutionError(
            ErrorMessage.NONPOSITIVE_FORM,
            f"min ω/h={low:.3e} at grid index ({i1}, {i2})",
        )
    lap = laplacian_z_array(np.log(ratio), tau)
    return TwoFormField(grid=w.grid, w=0.25 * tau.imag * lap - np.pi * n_bands**2)


def residuals_from_forms(
    forms: List[TwoFormField],
    tau: ModularParameter,
    top_ricci: Optional[TwoFormField] = None,
) -> List[float]:
    """
    max |Ric ω^(j) − ω^(j+1) + 2ω^(j) − ω^(j−1)| for j = 0…N−2, forms indexed from j = −1.
    `top_ricci` replaces the spectral Ricci form at j = N−2.
    """
    n_bands = len(forms) - 1
    out = []
    for j in range(n_bands - 1):
        if j == n_bands - 2 and top_ricci is not None:
            lhs = top_ricci.w
        else:
            lhs = ricci_form(forms[j + 1], tau).w
        rhs = forms[j + 2].w - 2.0 * forms[j + 1].w + forms[j].w
        out.append(float(np.max(np.abs(lhs - rhs))))
    return out


def recurrence_residuals(frames: OrthoFrameField, tau: ModularParameter) -> RecurrenceReport:
    with timed(logger, "recurrence.residuals", n=frames.grid.n, N=frames.n_bands):
        forms = two_form_sequence(frames)
        residuals = residuals_from_forms(forms, tau, top_ricci_form(frames, tau))
    logger.info("recurrence.residuals max=%.3e", max(residuals))
    return RecurrenceReport(residuals=residuals, grid=frames.grid, n_levels=frames.n_bands)


def _step(
    forms: Dict[int, np.ndarray], src: int, prev: int, tau: ModularParameter, grid
) -> np.ndarray:
    try:
        ric = ricci_form(TwoFormField(grid=grid, w=forms[src]), tau).w
    except ResolutionError as e:
        e.detail = f"level {src}: {e.detail}"
        raise
    return ric + 2.0 * forms[src] - forms[prev]


def reconstruct_sequence(
    w_km1: TwoFormField,
    w_k: TwoFormField,
    k: int,
    n_bands: int,
    tau: ModularParameter,
) -> ReconstructedSequence:
    """
    Rebuild ω^(−1)…ω^(N−1) from the consecutive pair (ω^(k−1), ω^(k)).

    Upward ω^(j+1) = Ric ω^(j) + 2ω^(j) − ω^(j−1) up to ω^(N−2); downward
    ω^(j−2) = Ric ω^(j−1) + 2ω^(j−1) − ω^(j) down to ω^(−1). The last upward step uses
    the smooth Ricci form of ω^(N−2), which vanishes at the hyperflexes, so ω^(N−1) is
    its computed smooth part and should vanish pointwise. Both terminals and the
    hyperflex mass (1/π)∫(2ω^(N−2) − ω^(N−3)) are reported for audit.
    """
    if not 1 <= k <= n_bands - 2:
        raise InputError(ErrorMessage.LEVEL_OUT_OF_RANGE, f"k={k} (N={n_bands})")
    if w_km1.w.shape != w_k.w.shape:
        raise InputError(ErrorMessage.SHAPE_MISMATCH, f"{w_km1.w.shape} vs {w_k.w.shape}")
    grid = w_k.grid
    forms: Dict[int, np.ndarray] = {k - 1: w_km1.w, k: w_k.w}
    with timed(logger, "recurrence.reconstruct", n=grid.n, N=n_bands, k=k):
        for j in range(k, n_bands - 2):
            forms[j + 1] = _step(forms, j, j - 1, tau, grid)
        for j in range(k, 0, -1):
            forms[j - 2] = _step(forms, j - 1, j, tau, grid)
        top = n_bands - 2
        try:
            ric = smooth_top_ricci_form(TwoFormField(grid=grid, w=forms[top]), tau, n_bands).w
        except ResolutionError as e:
            e.detail = f"level {top}: {e.detail}"
            raise
        forms[n_bands - 1] = ric + 2.0 * forms[top] - forms[top - 1]
    sequence = [TwoFormField(grid=grid, w=forms[j]) for j in range(-1, n_bands)]
    mass = degree(TwoFormField(grid=grid, w=2.0 * forms[top] - forms[top - 1]))
    lower = float(np.max(np.abs(forms[-1])))
    upper = float(np.max(np.abs(forms[n_bands - 1])))
    logger.info(
        "recurrence.reconstruct.terminal lower=%.3e upper=%.3e mass=%.6f", lower, upper, mass
    )
    return ReconstructedSequence(
        forms=sequence,
        k=k,
        lower_terminal_max=lower,
        upper_terminal_max=upper,
        hyperflex_mass=mass,
    )
