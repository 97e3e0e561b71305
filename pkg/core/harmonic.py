# core/harmonic.py
import logging
from typing import List, Optional, Tuple
import numpy as np
import scipy.optimize
from config.settings import settings
from core.entities import (
    HyperosculationReport,
    JetFrameField,
    OrthoFrameField,
    ProjectorField,
    ThetaBasis,
)
from core.theta import lift_values
from core.torus import to_complex
from util.enums import ErrorMessage
from util.errors import InputError, ResolutionError
from util.timing import timed

logger = logging.getLogger(__name__)


def _inner(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.sum(np.conj(q) * v, axis=-1, keepdims=True)


def _project_out(v: np.ndarray, basis: List[np.ndarray]) -> np.ndarray:
    # one modified Gram–Schmidt sweep, pointwise over the grid
    for q in basis:
        v = v - q * _inner(q, v)
    return v


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate each vector so its largest-modulus component is real positive."""
    idx = np.argmax(np.abs(v), axis=-1)
    lead = np.take_along_axis(v, idx[..., None], axis=-1)
    return v * (np.conj(lead) / np.abs(lead))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _complement(basis: List[np.ndarray], dim: int) -> np.ndarray:
    """Unit vector spanning the orthogonal complement of N−1 orthonormal vectors."""
    eye = np.eye(dim, dtype=complex)
    q = eye - sum(np.einsum("...i,...j->...ij", b, np.conj(b)) for b in basis)
    pick = np.argmax(np.linalg.norm(q, axis=-2), axis=-1)
    v = np.take_along_axis(q, pick[..., None, None], axis=-1)[..., 0]
    v = _project_out(_project_out(_unit(v), basis), basis)
    return _fix_phase(_unit(v))


def _outer(v: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...j->...ij", v, np.conj(v))


def gram_schmidt_frames(
    jets: JetFrameField, rank_tol: float = settings.RANK_TOL
) -> OrthoFrameField:
    """
    Orthonormal Frenet frames f̂_0…f̂_{N−1} from the jets of order N−1.

    f̂_k ∝ (1 − Π_{k−1})(d/dz)^k f̃ for k ≤ N−2, by modified Gram–Schmidt with one
    reorthogonalization sweep. The last vector completes the flag as the orthogonal
    complement; its jet residual ν_{N−1} is kept in `norms` and vanishes at hyperflexes.
    """
    n_bands = jets.n_bands
    if jets.order != n_bands - 1:
        raise InputError(ErrorMessage.INVALID_ORDER, f"need order {n_bands - 1}, got {jets.order}")
    frames = jets.frames
    with timed(logger, "frames.gram_schmidt", n=jets.grid.n, N=n_bands):
        sigma_max = np.linalg.norm(frames[..., : n_bands - 1], ord=2, axis=(-2, -1))
        norms = np.empty(frames.shape[:2] + (n_bands,), dtype=float)
        basis: List[np.ndarray] = []
        for k in range(n_bands - 1):
            v = _project_out(_project_out(frames[..., k], basis), basis)
            nu = np.linalg.norm(v, axis=-1)
            bad = nu <= rank_tol * sigma_max
            if np.any(bad):
                i1, i2 = np.argwhere(bad)[0]
                raise ResolutionError(
                    ErrorMessage.RANK_DEFICIENT,
                    f"jet column {k} at grid index ({i1}, {i2}), ratio={nu[i1, i2] / sigma_max[i1, i2]:.3e}",
                )
            norms[..., k] = nu
            basis.append(_fix_phase(v / nu[..., None]))
        top = _project_out(_project_out(frames[..., n_bands - 1], basis), basis)
        norms[..., n_bands - 1] = np.linalg.norm(top, axis=-1)
        basis.append(_complement(basis, n_bands))
    return OrthoFrameField(grid=jets.grid, vectors=np.stack(basis, axis=-1), norms=norms)


def frame_defect(frames: OrthoFrameField) -> float:
    """max over the grid of ‖V†V − I‖ (entrywise max)."""
    v = frames.vectors
    gram = np.einsum("...ai,...aj->...ij", np.conj(v), v)
    return float(np.max(np.abs(gram - np.eye(frames.n_bands))))


def lift_projector(jets: JetFrameField) -> ProjectorField:
    """Rank-1 projector onto the lift direction f̃/‖f̃‖; any jet order."""
    return ProjectorField(grid=jets.grid, rank=1, matrices=_outer(_unit(jets.frames[..., 0])))


def level_projector(frames: OrthoFrameField, k: int) -> ProjectorField:
    """P_k = f̂_k f̂_k†, the harmonic map f_k."""
    if not 0 <= k <= frames.n_bands - 1:
        raise InputError(ErrorMessage.LEVEL_OUT_OF_RANGE, f"k={k} (N={frames.n_bands})")
    return ProjectorField(grid=frames.grid, rank=1, matrices=_outer(frames.vectors[..., k]))


def osculating_projector(frames: OrthoFrameField, k: int) -> ProjectorField:
    """Π_k = Σ_{j≤k} P_j, the associated curve f^(k)."""
    if not 0 <= k <= frames.n_bands - 1:
        raise InputError(ErrorMessage.LEVEL_OUT_OF_RANGE, f"k={k} (N={frames.n_bands})")
    v = frames.vectors[..., : k + 1]
    return ProjectorField(
        grid=frames.grid,
        rank=k + 1,
        matrices=np.einsum("...ik,...jk->...ij", v, np.conj(v)),
    )


def _local_minima(values: np.ndarray) -> np.ndarray:
    mask = np.ones(values.shape, dtype=bool)
    for s1 in (-1, 0, 1):
        for s2 in (-1, 0, 1):
            if s1 or s2:
                mask &= values <= np.roll(values, (s1, s2), axis=(0, 1))
    return mask


def _smallest_singular_value(frames: np.ndarray, k: int) -> np.ndarray:
    cols = frames[..., : k + 1]
    normalized = cols / np.linalg.norm(cols, axis=-2, keepdims=True)
    return np.linalg.svd(normalized, compute_uv=False)[..., -1]


def _polish_minimum(basis: ThetaBasis, k: int, start: Tuple[float, float], step: float) -> float:
    """
    Continuous minimum of the order-k singular value near a grid minimum, over the
    closed cell the grid samples; the lift is only quasi-periodic, so jets are not
    compared across cells.
    """
    tau = basis.tau

    def objective(x: np.ndarray) -> float:
        z = to_complex(x[0], x[1], tau)
        return float(_smallest_singular_value(lift_values(basis, z, k), k))

    x0 = np.asarray(start, dtype=float)
    simplex = np.array([x0, x0 + (step, 0.0), x0 + (0.0, step)])
    result = scipy.optimize.minimize(
        objective,
        x0,
        method="Nelder-Mead",
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000},
    )
    return min(float(result.fun), objective(x0))


def check_no_hyperosculation(
    jets: JetFrameField,
    basis: Optional[ThetaBasis] = None,
    rank_tol: float = settings.RANK_TOL,
    hyperflex_tol: float = settings.HYPERFLEX_TOL,
) -> HyperosculationReport:
    """
    Report-only audit of jet degeneracy.

    - min_abs_wronskian: min of |det| of the column-normalized N×N jet matrix. For a
      degree-N elliptic curve this vanishes at its N² hyperflexes.
    - min_singular_values[k], k ≤ N−2: min smallest singular value of the first k+1
      normalized columns; strictly positive when there are no special points. With
      the `basis` the jets were lifted from, each grid minimum is refined over
      continuous (k1, k2), so the value does not depend on the grid.
    - hyperflexes: grid points that are local minima of the normalized Wronskian below
      `hyperflex_tol`.
    """
    n_bands = jets.n_bands
    if jets.order != n_bands - 1:
        raise InputError(ErrorMessage.INVALID_ORDER, f"need order {n_bands - 1}, got {jets.order}")
    grid = jets.grid
    with timed(logger, "frames.hyperosculation", n=grid.n, N=n_bands):
        normalized = jets.frames / np.linalg.norm(jets.frames, axis=-2, keepdims=True)
        wronskian = np.abs(np.linalg.det(normalized))
        flagged = np.argwhere((wronskian < hyperflex_tol) & _local_minima(wronskian))
        min_sv = []
        for k in range(n_bands - 1):
            s = _smallest_singular_value(jets.frames, k)
            i1, i2 = np.unravel_index(np.argmin(s), s.shape)
            value = float(s[i1, i2])
            if basis is not None and _is_lift_of(basis, jets, i1, i2):
                value = min(value, _polish_minimum(basis, k, (i1 / grid.n, i2 / grid.n), 1.0 / grid.n))
            min_sv.append(value)
    hyperflexes = [(i1 / grid.n, i2 / grid.n) for i1, i2 in flagged]
    report = HyperosculationReport(
        grid=grid,
        min_abs_wronskian=float(np.min(wronskian)),
        min_singular_values=min_sv,
        special_free=all(s > rank_tol for s in min_sv),
        hyperflexes=hyperflexes,
    )
    logger.info(
        "frames.hyperosculation.report min_wr=%.3e min_sv=%.3e hyperflexes=%d",
        report.min_abs_wronskian,
        min(min_sv),
        len(hyperflexes),
    )
    return report


def _is_lift_of(basis: ThetaBasis, jets: JetFrameField, i1: int, i2: int) -> bool:
    grid = jets.grid
    z = to_complex(i1 / grid.n, i2 / grid.n, basis.tau)
    expected = lift_values(basis, z, jets.order)
    found = jets.frames[i1, i2]
    if np.allclose(found, expected, rtol=1e-10, atol=1e-12 * float(np.max(np.abs(expected)))):
        return True
    logger.warning("frames.hyperosculation.unpolished reason=jets_not_from_basis")
    return False
