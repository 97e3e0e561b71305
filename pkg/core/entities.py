# core/entities.py
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import numpy as np
from util.enums import ErrorMessage
from util.errors import InputError


@dataclass(frozen=True)
class ModularParameter:
    """
    Complex structure of the elliptic curve C = ℂ/(ℤ + τℤ).
    """

    tau: complex

    def __post_init__(self) -> None:
        tau = complex(self.tau)
        if not np.isfinite(tau.real) or not np.isfinite(tau.imag) or tau.imag <= 0:
            raise InputError(ErrorMessage.INVALID_TAU, f"tau={tau}")
        object.__setattr__(self, "tau", tau)

    @property
    def imag(self) -> float:
        return self.tau.imag

    @property
    def real(self) -> float:
        return self.tau.real

    @property
    def abs2(self) -> float:
        return abs(self.tau) ** 2


@dataclass(frozen=True)
class BZGrid:
    """
    Uniform periodic n×n sample of the unit square, k_i = j/n.
    Arrays on the grid are indexed [i1, i2] with axis 0 along k1.
    """

    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 4:
            raise InputError(ErrorMessage.GRID_TOO_SMALL, f"n={self.n} (need n >= 4)")

    @property
    def axis(self) -> np.ndarray:
        return np.arange(self.n, dtype=float) / self.n

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")


@dataclass
class PeriodicScalarField:
    grid: BZGrid
    values: np.ndarray  # (n, n) real or complex


@dataclass
class TwoFormField:
    """
    Coefficient of dk1∧dk2 on the grid.
    """

    grid: BZGrid
    w: np.ndarray  # (n, n) float64


@dataclass
class ThetaBasis:
    """
    Level-N theta basis θ[j/N, 0](Nz, Nτ), j = 0…N−1, of the degree-N complete linear system.
    """

    tau: ModularParameter
    n_bands: int
    characteristics: List[Tuple[float, float]]
    truncation: int  # series cutoff M for jets up to order N−1 on the fundamental domain
    tol: float


@dataclass
class JetFrameField:
    grid: BZGrid
    order: int
    frames: np.ndarray  # (n, n, N, order+1) complex128, column c = (d/dz)^c f̃

    @property
    def n_bands(self) -> int:
        return self.frames.shape[-2]


@dataclass
class OrthoFrameField:
    grid: BZGrid
    vectors: np.ndarray  # (n, n, N, N) complex128, column k = f̂_k
    norms: np.ndarray  # (n, n, N) float64, pre-normalization Gram–Schmidt norms ν_k

    @property
    def n_bands(self) -> int:
        return self.vectors.shape[-1]


@dataclass
class ProjectorField:
    grid: BZGrid
    rank: int
    matrices: np.ndarray  # (n, n, N, N) complex128 Hermitian idempotents

    @property
    def dim(self) -> int:
        return self.matrices.shape[-1]


@dataclass
class HyperosculationReport:
    grid: BZGrid
    min_abs_wronskian: float
    min_singular_values: List[float]  # per order k = 0…N−2
    special_free: bool
    hyperflexes: List[Tuple[float, float]] = field(default_factory=list)


@dataclass
class QGTField:
    grid: BZGrid
    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    w12: np.ndarray

    @property
    def det_g(self) -> np.ndarray:
        return self.g11 * self.g22 - self.g12**2


@dataclass
class WirtingerReport:
    field: PeriodicScalarField
    max: float
    min: float


@dataclass
class ChernReport:
    chern: int
    plaquette_min_modulus: float
    grid: BZGrid
    flux: float  # Σ plaquette phases / 2π before rounding


@dataclass
class RecurrenceReport:
    residuals: List[float]  # j = 0…N−2
    grid: BZGrid
    n_levels: int


@dataclass
class ReconstructedSequence:
    forms: List[TwoFormField]  # ω^(j) for j = −1…N−1
    k: int
    lower_terminal_max: float  # max |ω^(−1)| as reconstructed
    upper_terminal_max: float  # max |ω^(N−1)|, smooth part
    hyperflex_mass: float  # (1/π)∫(2ω^(N−2) − ω^(N−3))

    def level(self, j: int) -> TwoFormField:
        return self.forms[j + 1]


@dataclass
class UnitaryRecovery:
    sigma: np.ndarray  # (N, N) complex128
    unitarity_defect: float
    alignment_residual: float
    eigengap: float
    singular_spread: float  # max/min singular value of the raw minimizer
    equivalent: bool
    fidelity: Optional[float] = None


@dataclass
class HoppingSpec:
    dim: int
    n_bands: int
    cutoff: int
    hoppings: Dict[Tuple[int, int], np.ndarray]  # γ -> (N, N) complex128, closed under γ -> −γ


@dataclass
class BlochField:
    grid: BZGrid
    h_k: np.ndarray  # (n, n, N, N) complex128
    energies: np.ndarray  # (n, n, N) ascending
    states: np.ndarray  # (n, n, N, N) eigenvectors as columns
    gap: Optional[float] = None  # set once the Fermi level is fixed
