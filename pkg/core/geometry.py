# core/geometry.py
"""
Quantum geometry of projector fields.

Conventions, fixed once:
  g_ij = ½ Re tr(∂_iP ∂_jP)
  w12  = −(i/2) tr(P[∂_1P, ∂_2P])
  deg  = (1/π) ∫ w12 dk1∧dk2
so that a holomorphic rank-1 band has w12 = √det g > 0 and a projective line has area π.
"""
import itertools
import logging
from typing import Tuple
import numpy as np
from config.settings import settings
from core.entities import (
    ChernReport,
    ModularParameter,
    OrthoFrameField,
    PeriodicScalarField,
    ProjectorField,
    QGTField,
    TwoFormField,
    WirtingerReport,
)
from core.harmonic import osculating_projector
from core.torus import derivative_array, integrate_two_form, laplacian_z_array
from util.enums import ErrorMessage
from util.errors import InputError, ResolutionError
from util.timing import timed

logger = logging.getLogger(__name__)


def _tr2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...ji->...", a, b)


def _tr3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...jk,...ki->...", a, b, c)


def projector_defect(p: ProjectorField) -> Tuple[float, float, float]:
    """(idempotency, hermiticity, trace) defects, max over the grid."""
    m = p.matrices
    herm = float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2)))))
    idem = float(np.max(np.abs(m @ m - m)))
    trace = float(np.max(np.abs(np.trace(m, axis1=-2, axis2=-1) - p.rank)))
    return idem, herm, trace


def _require_projector(p: ProjectorField, tol: float) -> None:
    idem, herm, trace = projector_defect(p)
    if max(idem, herm, trace) > tol:
        raise InputError(
            ErrorMessage.PROJECTOR_INVARIANT,
            f"idempotency={idem:.2e} hermiticity={herm:.2e} trace={trace:.2e} tol={tol:g}",
        )


def projector_derivatives(p: ProjectorField) -> Tuple[np.ndarray, np.ndarray]:
    return derivative_array(p.matrices, 0), derivative_array(p.matrices, 1)


def qgt(p: ProjectorField, tol: float = settings.PROJECTOR_TOL) -> QGTField:
    _require_projector(p, tol)
    d1, d2 = projector_derivatives(p)
    m = p.matrices
    curl = _tr3(m, d1, d2) - _tr3(m, d2, d1)
    return QGTField(
        grid=p.grid,
        g11=0.5 * np.real(_tr2(d1, d1)),
        g12=0.5 * np.real(_tr2(d1, d2)),
        g22=0.5 * np.real(_tr2(d2, d2)),
        w12=np.real(-0.5j * curl),
    )


def _occupied_basis(p: ProjectorField) -> np.ndarray:
    _, vecs = np.linalg.eigh(p.matrices)
    return vecs[..., -p.rank :]


def _links(basis: np.ndarray, axis: int) -> np.ndarray:
    ahead = np.roll(basis, -1, axis=axis)
    overlap = np.einsum("...ai,...aj->...ij", np.conj(basis), ahead)
    return np.linalg.det(overlap)


def chern_number(
    p: ProjectorField,
    min_link: float = settings.LINK_MIN_MODULUS,
    min_grid: int = settings.CHERN_MIN_GRID,
) -> ChernReport:
    """
    Plaquette link-variable Chern number.
    Links are determinants of overlaps between orthonormal column bases at adjacent
    grid points; the plaquette phases sum to 2π·chern. Grids below `min_grid` fail the
    same link gate as vanishing links.
    """
    n = p.grid.n
    if p.rank < 1:
        raise InputError(ErrorMessage.PROJECTOR_INVARIANT, "rank 0 projector")
    with timed(logger, "geometry.chern", n=n, rank=p.rank):
        basis = _occupied_basis(p)
        u1 = _links(basis, 0)
        u2 = _links(basis, 1)
        modulus = float(min(np.min(np.abs(u1)), np.min(np.abs(u2))))
        if modulus < min_link:
            raise ResolutionError(
                ErrorMessage.LINK_MODULUS, f"min |U|={modulus:.3e} < {min_link:g} at n={n}"
            )
        if n < min_grid:
            raise ResolutionError(
                ErrorMessage.LINK_MODULUS, f"n={n} < {min_grid} grid floor (min |U|={modulus:.3e})"
            )
        plaquette = u1 * np.roll(u2, -1, axis=0) * np.conj(np.roll(u1, -1, axis=1)) * np.conj(u2)
        flux = float(np.sum(np.sum(np.angle(plaquette), axis=1))) / (2.0 * np.pi)
    chern = int(np.rint(flux))
    logger.info("geometry.chern.result chern=%d flux=%.12f min_link=%.3e", chern, flux, modulus)
    return ChernReport(chern=chern, plaquette_min_modulus=modulus, grid=p.grid, flux=flux)


def wirtinger_residual(q: QGTField) -> WirtingerReport:
    """r = √det g − |w12|; zero exactly on Kähler (±holomorphic) bands."""
    r = np.sqrt(np.clip(q.det_g, 0.0, None)) - np.abs(q.w12)
    return WirtingerReport(
        field=PeriodicScalarField(grid=q.grid, values=r),
        max=float(np.max(r)),
        min=float(np.min(r)),
    )


def associated_two_form(frames: OrthoFrameField, j: int) -> TwoFormField:
    """ω^(j) = w12 of Π_j; zero for j = −1 and j = N−1."""
    n_bands = frames.n_bands
    if not -1 <= j <= n_bands - 1:
        raise InputError(ErrorMessage.LEVEL_OUT_OF_RANGE, f"j={j} (N={n_bands})")
    if j in (-1, n_bands - 1):
        return TwoFormField(grid=frames.grid, w=np.zeros((frames.grid.n,) * 2))
    return TwoFormField(grid=frames.grid, w=qgt(osculating_projector(frames, j)).w12)


def plucker_projector(frames: OrthoFrameField, k: int) -> ProjectorField:
    """
    Rank-1 projector on ⋀^{k+1}ℂ^N onto the Plücker line of Π_k (k = −1 gives ⋀⁰ = ℂ).
    """
    n_bands = frames.n_bands
    shape = frames.vectors.shape[:2]
    if k < 0:
        return ProjectorField(grid=frames.grid, rank=1, matrices=np.ones(shape + (1, 1), dtype=complex))
    v = frames.vectors[..., : k + 1]
    coords = np.stack(
        [np.linalg.det(v[..., list(rows), :]) for rows in itertools.combinations(range(n_bands), k + 1)],
        axis=-1,
    )
    return ProjectorField(
        grid=frames.grid, rank=1, matrices=np.einsum("...i,...j->...ij", coords, np.conj(coords))
    )


def _tensor_curl(a, da, b, db) -> np.ndarray:
    """
    tr(Q[∂1Q, ∂2Q]) for Q = A⊗B, using tr((A⊗B)(X⊗Y)(X'⊗Y')) = tr(AXX')·tr(BYY').
    """
    def ordered(first: int, second: int) -> np.ndarray:
        left = ((da[first], b), (a, db[first]))
        right = ((da[second], b), (a, db[second]))
        total = 0j
        for x1, y1 in left:
            for x2, y2 in right:
                total = total + _tr3(a, x1, x2) * _tr3(b, y1, y2)
        return total

    return ordered(0, 1) - ordered(1, 0)


def sum_two_form(frames: OrthoFrameField, j: int) -> TwoFormField:
    """
    ω⟨j⟩: the Berry curvature of the f⟨j⟩ composite, the rank-1 projector
    Plücker(Π_{j−1}) ⊗ Plücker(Π_j).
    """
    n_bands = frames.n_bands
    if not 0 <= j <= n_bands - 1:
        raise InputError(ErrorMessage.LEVEL_OUT_OF_RANGE, f"j={j} (N={n_bands})")
    a = plucker_projector(frames, j - 1)
    b = plucker_projector(frames, j)
    curl = _tensor_curl(
        a.matrices, projector_derivatives(a), b.matrices, projector_derivatives(b)
    )
    return TwoFormField(grid=frames.grid, w=np.real(-0.5j * curl))


def trace_density(q: QGTField, tau: ModularParameter) -> TwoFormField:
    """½ tr_h(g)·dvol_h for the flat metric h = |dz|², as a dk1∧dk2 coefficient."""
    contracted = tau.abs2 * q.g11 - 2.0 * tau.real * q.g12 + q.g22
    return TwoFormField(grid=q.grid, w=contracted / (2.0 * tau.imag))


def dirichlet_energy(q: QGTField, tau: ModularParameter) -> float:
    return integrate_two_form(trace_density(q, tau))


def integrated_trace(q: QGTField, tau: ModularParameter) -> float:
    """(1/π)·Dirichlet energy; equals deg f^(k) + deg f^(k−1) on level k."""
    return dirichlet_energy(q, tau) / np.pi


def harmonicity_residual(p: ProjectorField, tau: ModularParameter) -> float:
    """max‖[Δ_zP, P]‖ / max‖Δ_zP‖ (operator norms), the projector Euler–Lagrange residual."""
    m = p.matrices
    if np.max(np.abs(m - m[:1, :1])) == 0.0:
        return 0.0
    lap = laplacian_z_array(m, tau)
    scale = float(np.max(np.linalg.norm(lap, ord=2, axis=(-2, -1))))
    if scale == 0.0:
        return 0.0
    comm = lap @ m - m @ lap
    return float(np.max(np.linalg.norm(comm, ord=2, axis=(-2, -1)))) / scale


def deform_projector(
    p: ProjectorField, eps: float = 1e-2, seed: int = 0, frequency: int = 6
) -> ProjectorField:
    """
    Rank-1 projector onto the top eigenvector of P + ε·X·cos(2π·frequency·k1),
    X a seeded Hermitian matrix. Smooth and periodic but not harmonic.
    """
    rng = np.random.default_rng(seed)
    dim = p.dim
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    herm = 0.5 * (raw + raw.conj().T)
    k1, _ = p.grid.mesh()
    bump = np.cos(2.0 * np.pi * frequency * k1)[..., None, None]
    _, vecs = np.linalg.eigh(p.matrices + eps * bump * herm)
    top = vecs[..., -1]
    return ProjectorField(grid=p.grid, rank=1, matrices=np.einsum("...i,...j->...ij", top, np.conj(top)))
