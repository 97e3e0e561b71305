# service/rigidity_service.py
import logging
from typing import List, Optional, Tuple
import numpy as np
from core.entities import ModularParameter, ProjectorField, UnitaryRecovery
from core.harmonic import level_projector, lift_projector
from core.rigidity import (
    random_unitary,
    recover_projective,
    recover_unitary,
    verify_conjugation,
)
from core.theta import translated_section_lift
from model.config import RunConfig
from model.reports import CheckResult, RigidityReport, RigidityTrial, UnitaryRecoveryDoc, Verdict
from repository import namespaces
from repository.artifact_repository import ArtifactRepository
from service.pipeline import ThetaPipeline, build_theta_pipeline
from util.enums import ErrorMessage, RigidityMode
from util.errors import InputError, stage
from util.timing import timed

logger = logging.getLogger(__name__)

# partner curve for cross-tau trials, not SL(2,Z)-equivalent to i
CROSS_TAU = ModularParameter(2j)
CROSS_TAU_FALLBACK = ModularParameter(1j)
# non-equivalent pairs must clear the equivalence threshold by this factor
CROSS_TAU_MARGIN = 1e3

EXPECTED: dict[RigidityMode, Verdict] = {
    RigidityMode.SEED: "equivalent",
    RigidityMode.CROSS_TAU: "non-equivalent",
    RigidityMode.TRANSLATION: "projective",
}


def _levels(pipe: ThetaPipeline) -> List[ProjectorField]:
    return [level_projector(pipe.frames, k) for k in range(pipe.frames.n_bands)]


def _pair(tau: ModularParameter) -> Tuple[float, float]:
    return (tau.real, tau.imag)


class RigidityService:
    def __init__(self, artifacts: Optional[ArtifactRepository] = None) -> None:
        self._artifacts = artifacts

    def _seed_trial(
        self, config: RunConfig, pipe: ThetaPipeline, levels: List[ProjectorField], index: int
    ) -> Tuple[RigidityTrial, UnitaryRecovery]:
        sigma = random_unitary(config.bands, config.seed + index)
        with stage("twist"):
            twisted = build_theta_pipeline(config.tau, config.bands, config.grid, twist=sigma)
            levels_prime = _levels(twisted)
        with stage("recover"):
            rec = recover_unitary(levels[0], levels_prime[0], ground_truth=sigma, threshold=config.tol("alignment"))
        with stage("conjugate"):
            conj = verify_conjugation(rec.sigma, levels, levels_prime)
        verdict: Verdict = "equivalent" if rec.equivalent else "non-equivalent"
        return (
            RigidityTrial(
                index=index,
                verdict=verdict,
                residual=rec.alignment_residual,
                singular_spread=rec.singular_spread,
                eigengap=rec.eigengap,
                fidelity=rec.fidelity,
                conjugation=conj,
            ),
            rec,
        )

    def _cross_tau_trial(
        self, config: RunConfig, levels: List[ProjectorField], other: ThetaPipeline, index: int
    ) -> Tuple[RigidityTrial, UnitaryRecovery]:
        sigma = random_unitary(config.bands, config.seed + index)
        with stage("twist"):
            other_twisted = build_theta_pipeline(other.basis.tau, config.bands, config.grid, twist=sigma)
        with stage("recover"):
            rec = recover_unitary(
                levels[0], level_projector(other_twisted.frames, 0), threshold=config.tol("alignment")
            )
        verdict: Verdict = "equivalent" if rec.equivalent else "non-equivalent"
        return (
            RigidityTrial(
                index=index,
                verdict=verdict,
                residual=rec.alignment_residual,
                singular_spread=rec.singular_spread,
                eigengap=rec.eigengap,
            ),
            rec,
        )

    def _translation_trial(
        self, config: RunConfig, pipe: ThetaPipeline, index: int
    ) -> Tuple[RigidityTrial, UnitaryRecovery]:
        rng = np.random.default_rng(config.seed + index)
        u1, u2 = rng.uniform(0.0, 0.5, size=2)
        c = complex(u1 + config.tau.tau * u2)
        p = lift_projector(pipe.jets)
        with stage("translate"):
            p_prime = lift_projector(translated_section_lift(pipe.basis, pipe.grid, c))
        with stage("recover"):
            sigma = recover_projective(p, p_prime)
            conj = verify_conjugation(sigma, [p], [p_prime])
            rec = recover_unitary(p, p_prime, threshold=config.tol("alignment"))
        projective = conj[0] <= config.tol("projective")
        if rec.equivalent:
            verdict: Verdict = "equivalent"
        else:
            verdict = "projective" if projective else "non-equivalent"
        return (
            RigidityTrial(
                index=index,
                verdict=verdict,
                residual=rec.alignment_residual,
                singular_spread=rec.singular_spread,
                eigengap=rec.eigengap,
                conjugation=conj,
                offset=(c.real, c.imag),
            ),
            rec,
        )

    def compute(self, config: RunConfig, mode: RigidityMode, trials: int) -> RigidityReport:
        """
        seed: seeded unitary twists σ∘f, recovered and checked on every level.
        cross-tau: f against a twisted embedding of a different curve.
        translation: f against the translated-section embedding (GL, not unitary).
        """
        mode = RigidityMode(mode)
        if trials < 1:
            raise InputError(ErrorMessage.INVALID_CONFIG, f"trials={trials} (need >= 1)")
        expected = EXPECTED[mode]
        with timed(logger, "rigidity", mode=mode.value, trials=trials, n=config.grid, N=config.bands):
            pipe = build_theta_pipeline(config.tau, config.bands, config.grid)
            levels = _levels(pipe)
            tau_prime = config.tau
            other: Optional[ThetaPipeline] = None
            if mode is RigidityMode.CROSS_TAU:
                tau_prime = CROSS_TAU if config.tau.tau != CROSS_TAU.tau else CROSS_TAU_FALLBACK
                other = build_theta_pipeline(tau_prime, config.bands, config.grid)

            results: List[RigidityTrial] = []
            first: Optional[UnitaryRecovery] = None
            for index in range(trials):
                if mode is RigidityMode.SEED:
                    trial, rec = self._seed_trial(config, pipe, levels, index)
                elif mode is RigidityMode.CROSS_TAU:
                    trial, rec = self._cross_tau_trial(config, levels, other, index)
                else:
                    trial, rec = self._translation_trial(config, pipe, index)
                logger.info(
                    "rigidity.trial index=%d verdict=%s residual=%.3e spread=%.6f",
                    index,
                    trial.verdict,
                    trial.residual,
                    trial.singular_spread,
                )
                results.append(trial)
                first = first or rec

        checks = [
            CheckResult.equals("verdicts_match", sum(t.verdict == expected for t in results), trials)
        ]
        if mode is RigidityMode.SEED:
            checks.append(
                CheckResult.at_least(
                    "fidelity", min(t.fidelity for t in results), 1.0 - config.tol("fidelity")
                )
            )
            checks.append(
                CheckResult.at_most(
                    "conjugation", max(max(t.conjugation) for t in results), config.tol("conjugation")
                )
            )
        elif mode is RigidityMode.TRANSLATION:
            checks.append(
                CheckResult.at_most(
                    "projective_conjugation", max(t.conjugation[0] for t in results), config.tol("projective")
                )
            )
            checks.append(
                CheckResult.at_least("singular_spread", min(t.singular_spread for t in results), 1.0 + 1e-3)
            )
        else:
            checks.append(
                CheckResult.at_least(
                    "alignment_residual",
                    min(t.residual for t in results),
                    CROSS_TAU_MARGIN * config.tol("alignment"),
                )
            )

        report = RigidityReport(
            ok=all(c.passed for c in checks),
            mode=mode.value,
            expected=expected,
            tau=_pair(config.tau),
            tau_prime=_pair(tau_prime),
            N=config.bands,
            n=config.grid,
            trials=results,
            recovery=UnitaryRecoveryDoc.of(first),
            checks=checks,
        )
        logger.info("rigidity.result mode=%s ok=%s", mode.value, report.ok)
        return report

    def run(self, config: RunConfig, mode: RigidityMode, trials: int) -> RigidityReport:
        report = self.compute(config, mode, trials)
        repo = self._artifacts or ArtifactRepository(config.output_dir)
        with stage("persist"):
            repo.write_json(namespaces.RECOVERY, report.recovery.model_dump())
            repo.write_json(namespaces.RIGIDITY_REPORT, report.model_dump())
            repo.write_manifest("rigidity", {**config.inputs(), "mode": RigidityMode(mode).value, "trials": trials})
        return report
