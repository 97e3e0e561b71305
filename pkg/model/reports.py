# model/reports.py
from typing import Any, List, Literal, Optional, Tuple
import numpy as np
from pydantic import BaseModel
from core.entities import (
    ChernReport,
    HyperosculationReport,
    ProjectorField,
    RecurrenceReport,
    ThetaBasis,
    UnitaryRecovery,
    WirtingerReport,
)

Relation = Literal["<=", ">=", "=="]
Verdict = Literal["equivalent", "non-equivalent", "projective"]


class CheckResult(BaseModel):
    name: str
    value: float
    tolerance: float
    relation: Relation
    passed: bool

    @classmethod
    def at_most(cls, name: str, value: float, tolerance: float) -> "CheckResult":
        return cls(name=name, value=value, tolerance=tolerance, relation="<=", passed=bool(value <= tolerance))

    @classmethod
    def at_least(cls, name: str, value: float, tolerance: float) -> "CheckResult":
        return cls(name=name, value=value, tolerance=tolerance, relation=">=", passed=bool(value >= tolerance))

    @classmethod
    def equals(cls, name: str, value: float, expected: float) -> "CheckResult":
        return cls(name=name, value=value, tolerance=expected, relation="==", passed=bool(value == expected))


class BasisDoc(BaseModel):
    tau: Tuple[float, float]
    N: int
    tol: float
    truncation: int

    @classmethod
    def of(cls, basis: ThetaBasis) -> "BasisDoc":
        return cls(
            tau=(basis.tau.real, basis.tau.imag),
            N=basis.n_bands,
            tol=basis.tol,
            truncation=basis.truncation,
        )


class ChernDoc(BaseModel):
    chern: int
    min_link: float
    n: int

    @classmethod
    def of(cls, report: ChernReport) -> "ChernDoc":
        return cls(chern=report.chern, min_link=report.plaquette_min_modulus, n=report.grid.n)


class WirtingerDoc(BaseModel):
    level: int
    max: float
    min: float
    n: int

    @classmethod
    def of(cls, report: WirtingerReport, level: int) -> "WirtingerDoc":
        return cls(level=level, max=report.max, min=report.min, n=report.field.grid.n)


class ProjectorDoc(BaseModel):
    """Binary-free projector field; re/im are nested [i1][i2][row][col]."""

    n: int
    N: int
    rank: int
    re: List[Any]
    im: List[Any]

    @classmethod
    def of(cls, p: ProjectorField) -> "ProjectorDoc":
        return cls(
            n=p.grid.n,
            N=p.dim,
            rank=p.rank,
            re=np.real(p.matrices).tolist(),
            im=np.imag(p.matrices).tolist(),
        )


class HyperosculationDoc(BaseModel):
    min_abs_wronskian: float
    min_singular_values: List[float]
    special_free: bool
    hyperflexes: List[Tuple[float, float]]

    @classmethod
    def of(cls, report: HyperosculationReport) -> "HyperosculationDoc":
        return cls(
            min_abs_wronskian=report.min_abs_wronskian,
            min_singular_values=report.min_singular_values,
            special_free=report.special_free,
            hyperflexes=report.hyperflexes,
        )


class RecurrenceDoc(BaseModel):
    residuals: List[float]
    n: int
    N: int

    @classmethod
    def of(cls, report: RecurrenceReport) -> "RecurrenceDoc":
        return cls(residuals=report.residuals, n=report.grid.n, N=report.n_levels)


class UnitaryRecoveryDoc(BaseModel):
    sigma_re: List[List[float]]
    sigma_im: List[List[float]]
    residual: float
    unitarity_defect: float
    eigengap: float
    singular_spread: float
    fidelity: Optional[float] = None

    @classmethod
    def of(cls, rec: UnitaryRecovery) -> "UnitaryRecoveryDoc":
        return cls(
            sigma_re=np.real(rec.sigma).tolist(),
            sigma_im=np.imag(rec.sigma).tolist(),
            residual=rec.alignment_residual,
            unitarity_defect=rec.unitarity_defect,
            eigengap=rec.eigengap,
            singular_spread=rec.singular_spread,
            fidelity=rec.fidelity,
        )


class BandReport(BaseModel):
    ok: bool
    tau: Tuple[float, float]
    N: int
    n: int
    level: int
    chern: ChernDoc
    expected_chern: int
    wirtinger: WirtingerDoc
    checks: List[CheckResult]


class VerifyReport(BaseModel):
    ok: bool
    tau: Tuple[float, float]
    N: int
    n: int
    perturbed: bool
    hyperosculation: HyperosculationDoc
    chern_by_level: List[int]
    recurrence: RecurrenceDoc
    hyperflex_mass: float
    integrated_trace: List[float]
    harmonicity: List[float]
    checks: List[CheckResult]


class RigidityTrial(BaseModel):
    index: int
    verdict: Verdict
    residual: float
    singular_spread: float
    eigengap: float
    fidelity: Optional[float] = None
    conjugation: List[float] = []
    offset: Optional[Tuple[float, float]] = None


class RigidityReport(BaseModel):
    ok: bool
    mode: str
    expected: Verdict
    tau: Tuple[float, float]
    tau_prime: Tuple[float, float]
    N: int
    n: int
    trials: List[RigidityTrial]
    recovery: UnitaryRecoveryDoc
    checks: List[CheckResult]


class GapDoc(BaseModel):
    e_fermi: float
    gap: float
    rank: int
    n: int


class TightBindingReport(BaseModel):
    ok: bool
    spec: str
    bands: int
    gap: GapDoc
    chern: ChernDoc
    kahler_deviation: float
    wirtinger_deviation: float
    immersion: bool
    checks: List[CheckResult]
