# core/rigidity.py
import logging
import math
from typing import List, Optional, Sequence, Tuple
import numpy as np
import scipy.linalg
from scipy.stats import unitary_group
from config.settings import settings
from core.entities import ProjectorField, QGTField, UnitaryRecovery
from util.enums import ErrorMessage
from util.errors import InputError, ResolutionError
from util.timing import timed

logger = logging.getLogger(__name__)


def _same_grid(a_shape: Tuple[int, ...], b_shape: Tuple[int, ...]) -> None:
    if a_shape != b_shape:
        raise InputError(ErrorMessage.SHAPE_MISMATCH, f"{a_shape} vs {b_shape}")


def metric_distance(q1: QGTField, q2: QGTField) -> float:
    """sup over the grid of max(|Δg11|, |Δg12|, |Δg22|)."""
    _same_grid(q1.g11.shape, q2.g11.shape)
    diffs = [np.abs(a - b) for a, b in ((q1.g11, q2.g11), (q1.g12, q2.g12), (q1.g22, q2.g22))]
    return float(max(np.max(d) for d in diffs))


def curvature_distance(q1: QGTField, q2: QGTField) -> float:
    _same_grid(q1.w12.shape, q2.w12.shape)
    return float(np.max(np.abs(q1.w12 - q2.w12)))


def random_unitary(n_bands: int, seed: int) -> np.ndarray:
    return unitary_group.rvs(n_bands, random_state=seed)


def sample_stride(n: int, n_bands: int, factor: int = settings.SAMPLE_FACTOR) -> int:
    """Largest stride that still keeps at least factor·N² sample points."""
    per_side = math.ceil(math.sqrt(factor * n_bands**2))
    return max(1, n // per_side)


def _rank_one_pair(p: ProjectorField, p_prime: ProjectorField) -> None:
    _same_grid(p.matrices.shape, p_prime.matrices.shape)
    if p.rank != 1 or p_prime.rank != 1:
        raise InputError(ErrorMessage.PROJECTOR_INVARIANT, f"ranks {p.rank}, {p_prime.rank} (need 1)")


def alignment_matrix(p: ProjectorField, p_prime: ProjectorField, stride: int = 1) -> np.ndarray:
    """
    A = mean over sampled points of Pᵀ ⊗ (I − P′), so that
    vec(σ)† A vec(σ) = mean ‖(I − P′)σP‖²_F with column-major vec.
    """
    dim = p.dim
    lhs = np.swapaxes(p.matrices[::stride, ::stride], -1, -2).reshape(-1, dim, dim)
    rhs = (np.eye(dim) - p_prime.matrices[::stride, ::stride]).reshape(-1, dim, dim)
    a = np.einsum("mij,mab->iajb", lhs, rhs).reshape(dim * dim, dim * dim)
    a = a / lhs.shape[0]
    return 0.5 * (a + a.conj().T)


def _lowest_minimizer(
    p: ProjectorField, p_prime: ProjectorField, eigengap_tol: float
) -> Tuple[np.ndarray, float, float]:
    dim = p.dim
    stride = sample_stride(p.grid.n, dim)
    a = alignment_matrix(p, p_prime, stride)
    vals, vecs = scipy.linalg.eigh(a)
    gap = float(vals[1] - vals[0])
    if gap < eigengap_tol:
        raise ResolutionError(
            ErrorMessage.DEGENERATE_EIGENSPACE, f"eigengap={gap:.3e} < {eigengap_tol:g}"
        )
    raw = vecs[:, 0].reshape(dim, dim, order="F")
    logger.debug("rigidity.eigensolve stride=%d lambda0=%.3e gap=%.3e", stride, vals[0], gap)
    return raw, gap, float(vals[0])


def alignment_residual(sigma: np.ndarray, p: ProjectorField, p_prime: ProjectorField) -> float:
    """mean over the full grid of ‖(I − P′)σP‖²_F."""
    dim = p.dim
    q = np.eye(dim) - p_prime.matrices
    # ‖QσP‖² = tr(P σ† Q σ P) = tr(σ† Q σ P) for projectors
    vals = np.einsum("ba,...bc,cd,...da->...", sigma.conj(), q, sigma, p.matrices)
    return float(np.mean(np.real(vals)))


def recover_unitary(
    p: ProjectorField,
    p_prime: ProjectorField,
    ground_truth: Optional[np.ndarray] = None,
    threshold: float = settings.ALIGNMENT_THRESHOLD,
    eigengap_tol: float = settings.EIGENGAP_TOL,
) -> UnitaryRecovery:
    """
    σ minimizing Σ‖(I − P′)σP‖², projected to U(N) by polar decomposition.
    The global phase is fixed so tr σ is real non-negative.
    """
    _rank_one_pair(p, p_prime)
    dim = p.dim
    with timed(logger, "rigidity.unitary", n=p.grid.n, N=dim):
        raw, gap, _ = _lowest_minimizer(p, p_prime, eigengap_tol)
        singular = scipy.linalg.svdvals(raw)
        spread = float(singular[0] / singular[-1]) if singular[-1] > 0 else math.inf
        sigma, _ = scipy.linalg.polar(raw)
        trace = np.trace(sigma)
        if abs(trace) > 0:
            sigma = sigma * (np.conj(trace) / abs(trace))
        defect = float(np.linalg.norm(sigma.conj().T @ sigma - np.eye(dim), 2))
        residual = alignment_residual(sigma, p, p_prime)
    fidelity = None
    if ground_truth is not None:
        fidelity = float(abs(np.trace(sigma.conj().T @ np.asarray(ground_truth))) / dim)
    equivalent = residual <= threshold
    logger.info(
        "rigidity.unitary.result residual=%.3e spread=%.6f gap=%.3e equivalent=%s",
        residual,
        spread,
        gap,
        equivalent,
    )
    return UnitaryRecovery(
        sigma=sigma,
        unitarity_defect=defect,
        alignment_residual=residual,
        eigengap=gap,
        singular_spread=spread,
        equivalent=equivalent,
        fidelity=fidelity,
    )


def recover_projective(
    p: ProjectorField,
    p_prime: ProjectorField,
    eigengap_tol: float = settings.EIGENGAP_TOL,
    min_condition: float = 1e-8,
) -> np.ndarray:
    """GL(N) representative of the projective equivalence, unit largest singular value."""
    _rank_one_pair(p, p_prime)
    with timed(logger, "rigidity.projective", n=p.grid.n, N=p.dim):
        raw, _, _ = _lowest_minimizer(p, p_prime, eigengap_tol)
        singular = scipy.linalg.svdvals(raw)
    ratio = float(singular[-1] / singular[0])
    if ratio < min_condition:
        raise ResolutionError(
            ErrorMessage.SINGULAR_RECOVERY, f"sigma_min/sigma_max={ratio:.3e}"
        )
    return raw / singular[0]


def conjugate(sigma: np.ndarray, p: ProjectorField) -> ProjectorField:
    """
    σPσ† for unitary σ; for a general invertible σ the rank-1 image σPσ†/tr(σPσ†).
    """
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.shape != (p.dim, p.dim):
        raise InputError(ErrorMessage.SHAPE_MISMATCH, f"sigma {sigma.shape} vs N={p.dim}")
    image = np.einsum("ab,...bc,dc->...ad", sigma, p.matrices, sigma.conj())
    if np.allclose(sigma.conj().T @ sigma, np.eye(p.dim), atol=1e-12):
        return ProjectorField(grid=p.grid, rank=p.rank, matrices=image)
    if p.rank != 1:
        raise InputError(ErrorMessage.PROJECTOR_INVARIANT, "GL conjugation needs rank 1")
    trace = np.real(np.trace(image, axis1=-2, axis2=-1))
    return ProjectorField(grid=p.grid, rank=1, matrices=image / trace[..., None, None])


def verify_conjugation(
    sigma: np.ndarray,
    levels: Sequence[ProjectorField],
    levels_prime: Sequence[ProjectorField],
) -> List[float]:
    """Per-level max pointwise ‖σP_lσ† − P′_l‖ (operator norm)."""
    if len(levels) != len(levels_prime):
        raise InputError(ErrorMessage.SHAPE_MISMATCH, f"{len(levels)} vs {len(levels_prime)} levels")
    out = []
    for p, p_prime in zip(levels, levels_prime):
        _same_grid(p.matrices.shape, p_prime.matrices.shape)
        diff = conjugate(sigma, p).matrices - p_prime.matrices
        out.append(float(np.max(np.linalg.norm(diff, ord=2, axis=(-2, -1)))))
    return out
