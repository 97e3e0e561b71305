# service/tight_binding_service.py
import logging
from typing import List, Optional
from core.entities import BZGrid
from core.geometry import chern_number, qgt, wirtinger_residual
from core.tight_binding import (
    bloch_hamiltonian,
    fermi_projector_field,
    is_immersion,
    kahler_deviation,
    wirtinger_deviation,
)
from model.reports import CheckResult, ChernDoc, GapDoc, TightBindingReport
from repository import namespaces
from repository.artifact_repository import ArtifactRepository
from repository.spec_repository import SpecRepository
from util.errors import stage
from util.timing import timed

logger = logging.getLogger(__name__)

# |flux − chern| above this means the plaquette sum did not land on an integer
FLUX_TOL = 1e-6
# pointwise √det g ≥ |w12| and its integral hold for every band up to round-off
BOUND_TOL = 1e-8


class TightBindingService:
    def __init__(
        self,
        specs: SpecRepository,
        artifacts: Optional[ArtifactRepository] = None,
    ) -> None:
        self._specs = specs
        self._artifacts = artifacts

    def compute(self, spec_ref: str, n: int, e_fermi: float = 0.0, expected_chern: Optional[int] = None):
        """
        parse → bloch → fermi projector → QGT → Chern, plus the Kähler gate.
        Gap closures and rank changes surface as input errors from the fermi stage;
        everything after that is reported as checks.
        """
        with timed(logger, "tb", n=n, e_fermi=e_fermi):
            with stage("parse"):
                spec = self._specs.load(spec_ref)
                grid = BZGrid(n)
            with stage("bloch"):
                bloch = bloch_hamiltonian(spec, grid)
            with stage("fermi"):
                p = fermi_projector_field(bloch, e_fermi)
            with stage("qgt"):
                q = qgt(p)
            with stage("chern"):
                ch = chern_number(p)
        kahler = kahler_deviation(q)
        checks: List[CheckResult] = [
            CheckResult.at_most("chern_integrality", abs(ch.flux - ch.chern), FLUX_TOL),
            CheckResult.at_least("wirtinger_lower_bound", wirtinger_residual(q).min, -BOUND_TOL),
            CheckResult.at_least("kahler_deviation", kahler, -BOUND_TOL),
        ]
        if expected_chern is not None:
            checks.append(CheckResult.equals("chern", ch.chern, expected_chern))
        name = spec_ref if not spec_ref.lstrip().startswith("{") else "inline"
        report = TightBindingReport(
            ok=all(c.passed for c in checks),
            spec=name,
            bands=spec.n_bands,
            gap=GapDoc(e_fermi=e_fermi, gap=bloch.gap, rank=p.rank, n=n),
            chern=ChernDoc.of(ch),
            kahler_deviation=kahler,
            wirtinger_deviation=wirtinger_deviation(q),
            immersion=is_immersion(q),
            checks=checks,
        )
        logger.info(
            "tb.result spec=%s chern=%d gap=%.3e kahler=%.3e ok=%s",
            name,
            ch.chern,
            bloch.gap,
            report.kahler_deviation,
            report.ok,
        )
        return report, q

    def run(
        self,
        spec_ref: str,
        n: int,
        e_fermi: float,
        output_dir: str,
        expected_chern: Optional[int] = None,
    ) -> TightBindingReport:
        report, q = self.compute(spec_ref, n, e_fermi, expected_chern)
        repo = self._artifacts or ArtifactRepository(output_dir)
        with stage("persist"):
            repo.write_json(namespaces.GAP, report.gap.model_dump())
            repo.write_json(namespaces.CHERN, report.chern.model_dump())
            repo.write_qgt_csv(namespaces.QGT_CSV, q)
            repo.write_json(namespaces.TIGHT_BINDING_REPORT, report.model_dump())
            inputs = {"spec": report.spec, "grid": n, "fermi": e_fermi, "expect_chern": expected_chern}
            repo.write_manifest("tb", inputs)
        return report
