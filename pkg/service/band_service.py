# service/band_service.py
import logging
from dataclasses import dataclass
from typing import Optional
import numpy as np
from core.entities import ProjectorField, QGTField, WirtingerReport
from core.geometry import chern_number, qgt, wirtinger_residual
from core.harmonic import level_projector
from model.config import RunConfig
from model.reports import BandReport, BasisDoc, CheckResult, ChernDoc, ProjectorDoc, WirtingerDoc
from repository import namespaces
from repository.artifact_repository import ArtifactRepository
from service.pipeline import ThetaPipeline, build_theta_pipeline
from util.errors import stage
from util.timing import timed

logger = logging.getLogger(__name__)


def expected_chern(level: int, n_bands: int) -> int:
    """N on levels 0…N−2; the last level closes the sum to zero."""
    return n_bands if level <= n_bands - 2 else -n_bands * (n_bands - 1)


@dataclass
class BandOutcome:
    report: BandReport
    pipeline: ThetaPipeline
    projector: ProjectorField
    qgt: QGTField
    wirtinger: WirtingerReport


class BandService:
    def __init__(self, artifacts: Optional[ArtifactRepository] = None) -> None:
        self._artifacts = artifacts

    def compute(self, config: RunConfig) -> BandOutcome:
        """
        lift → frames → level projector → QGT → Wirtinger → Chern for level k.
        Logs: one summary line with chern and Wirtinger extremes.
        """
        k, n_bands = config.level, config.bands
        tol = config.tol("wirtinger")
        with timed(logger, "band", n=config.grid, N=n_bands, k=k):
            pipe = build_theta_pipeline(config.tau, n_bands, config.grid)
            with stage("projector"):
                p = level_projector(pipe.frames, k)
            with stage("qgt"):
                q = qgt(p)
            with stage("wirtinger"):
                wr = wirtinger_residual(q)
            with stage("chern"):
                ch = chern_number(p)

        expected = expected_chern(k, n_bands)
        checks = [
            CheckResult.at_least("wirtinger_lower_bound", wr.min, -tol),
            CheckResult.equals("chern", ch.chern, expected),
        ]
        if k in (0, n_bands - 1):
            checks.append(CheckResult.at_most("wirtinger_saturation", wr.max, tol))
            # f_0 is holomorphic (w12 ≥ 0), f_{N−1} antiholomorphic (w12 ≤ 0)
            sign = 1.0 if k == 0 else -1.0
            scale = float(np.max(np.abs(q.w12)))
            checks.append(CheckResult.at_least("w12_sign", float(np.min(sign * q.w12)), -tol * scale))

        report = BandReport(
            ok=all(c.passed for c in checks),
            tau=(config.tau_re, config.tau_im),
            N=n_bands,
            n=config.grid,
            level=k,
            chern=ChernDoc.of(ch),
            expected_chern=expected,
            wirtinger=WirtingerDoc.of(wr, k),
            checks=checks,
        )
        logger.info(
            "band.result k=%d chern=%d wirtinger_max=%.3e ok=%s", k, ch.chern, wr.max, report.ok
        )
        return BandOutcome(report=report, pipeline=pipe, projector=p, qgt=q, wirtinger=wr)

    def run(self, config: RunConfig, save_projector: bool = False) -> BandReport:
        """compute() and persist every band artifact plus the manifest."""
        outcome = self.compute(config)
        repo = self._artifacts or ArtifactRepository(config.output_dir)
        with stage("persist"):
            repo.write_json(namespaces.BASIS, BasisDoc.of(outcome.pipeline.basis).model_dump())
            repo.write_qgt_csv(namespaces.QGT_CSV, outcome.qgt)
            repo.write_field_csv(namespaces.WIRTINGER_CSV, outcome.wirtinger.field)
            repo.write_json(namespaces.CHERN, outcome.report.chern.model_dump())
            repo.write_json(namespaces.WIRTINGER, outcome.report.wirtinger.model_dump())
            if save_projector:
                repo.write_json(namespaces.PROJECTOR, ProjectorDoc.of(outcome.projector).model_dump())
            repo.write_json(namespaces.BAND_REPORT, outcome.report.model_dump())
            repo.write_manifest("band", {**config.inputs(), "save_projector": save_projector})
        return outcome.report
