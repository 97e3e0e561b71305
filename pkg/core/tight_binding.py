# core/tight_binding.py
import json
import logging
from typing import Any, Dict
import numpy as np
from pydantic import ValidationError
from config.settings import settings
from core.entities import (
    BlochField,
    BZGrid,
    HoppingSpec,
    ModularParameter,
    ProjectorField,
    QGTField,
    TwoFormField,
)
from core.geometry import trace_density
from core.torus import integrate_two_form
from model.hopping import HoppingDocument
from util.enums import ErrorMessage
from util.errors import GapClosureError, InputError
from util.timing import timed

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
SQUARE_LATTICE = ModularParameter(1j)


def _validation_detail(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e.get("loc", []))
        parts.append(f"{loc}: {e.get('msg', '')}" if loc else e.get("msg", ""))
    return "; ".join(parts)


def parse_hopping_spec(document: str) -> HoppingSpec:
    """
    Validate a hopping-spec JSON document and close it under γ → −γ with h(−γ) = h(γ)†.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as e:
        raise InputError(ErrorMessage.MALFORMED_SPEC, f"line {e.lineno} col {e.colno}: {e.msg}") from e
    try:
        doc = HoppingDocument.model_validate(raw)
    except ValidationError as e:
        raise InputError(ErrorMessage.MALFORMED_SPEC, _validation_detail(e)) from e

    hoppings: Dict[tuple, np.ndarray] = {}
    for entry in doc.hoppings:
        gamma = (int(entry.gamma[0]), int(entry.gamma[1]))
        if gamma in hoppings:
            raise InputError(ErrorMessage.MALFORMED_SPEC, f"duplicate gamma {list(gamma)}")
        matrix = np.asarray(entry.matrix_re, dtype=complex)
        if entry.matrix_im is not None:
            matrix = matrix + 1j * np.asarray(entry.matrix_im, dtype=float)
        hoppings[gamma] = matrix

    onsite = hoppings.get((0, 0))
    if onsite is not None and not np.allclose(onsite, onsite.conj().T, rtol=0, atol=HERMITICITY_TOL):
        raise InputError(ErrorMessage.HERMITICITY_CONFLICT, "h(0) is not Hermitian")

    added = 0
    for gamma, matrix in list(hoppings.items()):
        if gamma == (0, 0):
            continue
        mirror = (-gamma[0], -gamma[1])
        if mirror in hoppings:
            if not np.allclose(hoppings[mirror], matrix.conj().T, rtol=0, atol=HERMITICITY_TOL):
                raise InputError(
                    ErrorMessage.HERMITICITY_CONFLICT,
                    f"h({list(mirror)}) != h({list(gamma)})^dagger",
                )
        else:
            hoppings[mirror] = matrix.conj().T
            added += 1
    logger.info("tb.parse bands=%d hoppings=%d closure_added=%d", doc.bands, len(hoppings), added)
    return HoppingSpec(dim=doc.dim, n_bands=doc.bands, cutoff=doc.cutoff, hoppings=hoppings)


def two_band_document(m: float) -> Dict[str, Any]:
    """
    h(k) = d(k)·σ with d = (sin 2πk1, sin 2πk2, m − cos 2πk1 − cos 2πk2),
    written as h(0) = mσz, h(e1) = −(i/2)σx − σz/2, h(e2) = −(i/2)σy − σz/2.
    """
    return {
        "dim": 2,
        "bands": 2,
        "cutoff": 1,
        "hoppings": [
            {"gamma": [0, 0], "matrix_re": [[m, 0.0], [0.0, -m]], "matrix_im": [[0.0, 0.0], [0.0, 0.0]]},
            {"gamma": [1, 0], "matrix_re": [[-0.5, 0.0], [0.0, 0.5]], "matrix_im": [[0.0, -0.5], [-0.5, 0.0]]},
            {"gamma": [0, 1], "matrix_re": [[-0.5, -0.5], [0.5, 0.5]], "matrix_im": [[0.0, 0.0], [0.0, 0.0]]},
        ],
    }


def two_band_model(m: float) -> HoppingSpec:
    return parse_hopping_spec(json.dumps(two_band_document(m)))


def bloch_hamiltonian(spec: HoppingSpec, grid: BZGrid) -> BlochField:
    """h(k) = Σ_γ h(γ)·exp(2πi k·γ), diagonalized pointwise."""
    k1, k2 = grid.mesh()
    n_bands = spec.n_bands
    with timed(logger, "tb.bloch", n=grid.n, bands=n_bands):
        h = np.zeros(k1.shape + (n_bands, n_bands), dtype=complex)
        for (g1, g2), matrix in sorted(spec.hoppings.items()):
            phase = np.exp(2j * np.pi * (k1 * g1 + k2 * g2))
            h += phase[..., None, None] * matrix
        energies, states = np.linalg.eigh(h)
    return BlochField(grid=grid, h_k=h, energies=energies, states=states)


def spectral_gap(bloch: BlochField, e_fermi: float) -> float:
    """min over the grid of the distance from E_F to the spectrum of h(k)."""
    return float(np.min(np.abs(bloch.energies - e_fermi)))


def fermi_projector_field(
    bloch: BlochField, e_fermi: float, gap_threshold: float = settings.GAP_THRESHOLD
) -> ProjectorField:
    """
    P(k) = Σ eigenprojectors with eigenvalue < E_F. Records the gap on `bloch`.
    """
    distance = spectral_gap(bloch, e_fermi)
    if distance < gap_threshold:
        i1, i2, _ = np.unravel_index(np.argmin(np.abs(bloch.energies - e_fermi)), bloch.energies.shape)
        n = bloch.grid.n
        raise GapClosureError(
            ErrorMessage.GAP_CLOSURE,
            f"min |E - E_F|={distance:.3e} < {gap_threshold:g} at k=({i1 / n:g}, {i2 / n:g})",
        )
    occupied = np.sum(bloch.energies < e_fermi, axis=-1)
    rank = int(occupied.flat[0])
    if np.any(occupied != rank):
        raise InputError(
            ErrorMessage.RANK_CHANGE, f"occupied count ranges {occupied.min()}..{occupied.max()}"
        )
    if rank == 0:
        raise InputError(ErrorMessage.RANK_CHANGE, f"no band below E_F={e_fermi:g}")
    bloch.gap = distance
    v = bloch.states[..., :rank]
    matrices = np.einsum("...ik,...jk->...ij", v, np.conj(v))
    logger.info("tb.fermi E_F=%g rank=%d gap=%.3e", e_fermi, rank, distance)
    return ProjectorField(grid=bloch.grid, rank=rank, matrices=matrices)


def wirtinger_deviation(q: QGTField) -> float:
    """∫(√det g − |w12|) dk1dk2. Identically zero for two-band models (target CP¹)."""
    residual = np.sqrt(np.clip(q.det_g, 0.0, None)) - np.abs(q.w12)
    return integrate_two_form(TwoFormField(grid=q.grid, w=residual))


def kahler_deviation(q: QGTField, tau: ModularParameter = SQUARE_LATTICE) -> float:
    """
    ∫(½ tr_h g·dvol_h − |w12|), energy minus area for the flat metric of τ.
    Pointwise ½ tr_h g·dvol_h ≥ √det g ≥ |w12|; zero exactly on ±holomorphic (Kähler) bands.
    """
    residual = trace_density(q, tau).w - np.abs(q.w12)
    return integrate_two_form(TwoFormField(grid=q.grid, w=residual))


def is_immersion(q: QGTField, tol: float = 1e-10) -> bool:
    """det g > 0 everywhere (relative to the largest metric entry)."""
    scale = max(float(np.max(np.abs(q.g11))), float(np.max(np.abs(q.g22))), 1e-300)
    return bool(np.min(q.det_g) > tol * scale**2)
