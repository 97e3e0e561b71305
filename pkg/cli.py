# cli.py
"""
Command-line entry point.

  python cli.py band --bands 3 --grid 64 --level 0 --out runs/band
  python cli.py verify --config run.json --perturb
  python cli.py rigidity --mode translation --trials 5
  python cli.py tb --spec two_band_m1 --fermi 0

Exit codes: 0 pass, 2 verification failure, 3 input error, 4 numerical resolution.
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional
from config.settings import settings
from model.config import DEFAULT_TOLERANCES, RunConfig
from repository.artifact_repository import ArtifactRepository
from repository.spec_repository import SpecRepository
from service.band_service import BandService
from service.rigidity_service import RigidityService
from service.tight_binding_service import TightBindingService
from service.verify_service import VerifyService
from util.constants import TOOL_NAME, TOOL_VERSION
from util.enums import ExitCode, RigidityMode
from util.errors import AppError, VerificationFailure
from util.logger import init_logger

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 3); exit 2 is reserved for failed checks."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(int(ExitCode.INPUT_ERROR), f"{self.prog}: error: {message}\n")


def _run_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run config; flags override its values")
    common.add_argument("--tau-re", type=float, help="Re(tau)")
    common.add_argument("--tau-im", type=float, help="Im(tau) > 0")
    common.add_argument("--bands", type=int, help="number of bands N >= 3")
    common.add_argument("--grid", type=int, help="grid size n, a power of two")
    common.add_argument("--level", type=int, help="level k in 0..N-1")
    common.add_argument("--seed", type=int, help="seed for random unitaries and controls")
    common.add_argument("--out", dest="output_dir", help=f"output directory (default {settings.OUTPUT_DIR})")
    for name in DEFAULT_TOLERANCES:
        common.add_argument(
            f"--tol-{name.replace('_', '-')}",
            dest=f"tol_{name}",
            type=float,
            help=f"tolerance '{name}' (default {DEFAULT_TOLERANCES[name]:g})",
        )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=TOOL_NAME, description="Harmonic bands workbench.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _run_flags()

    band = sub.add_parser("band", parents=[common], help="QGT, Chern and Wirtinger report for one level")
    band.add_argument("--save-projector", action="store_true", help="also write projector.json")

    verify = sub.add_parser("verify", parents=[common], help="consolidated verdict over every identity")
    verify.add_argument("--perturb", action="store_true", help="negative control: shift ω^(1) before the recurrence")

    rigidity = sub.add_parser("rigidity", parents=[common], help="unitary / projective equivalence recovery")
    rigidity.add_argument("--mode", choices=[m.value for m in RigidityMode], default=RigidityMode.SEED.value)
    rigidity.add_argument("--trials", type=int, default=20)

    tb = sub.add_parser("tb", help="tight-binding pipeline from a hopping spec")
    tb.add_argument("--spec", required=True, help="hopping-spec path or bundled model name")
    tb.add_argument("--fermi", type=float, default=0.0, help="Fermi energy")
    tb.add_argument("--grid", type=int, default=64)
    tb.add_argument("--expect-chern", type=int, default=None, help="fail unless the band has this Chern number")
    tb.add_argument("--out", dest="output_dir", default=settings.OUTPUT_DIR)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = ("tau_re", "tau_im", "bands", "grid", "level", "seed", "output_dir")
    out: Dict[str, Any] = {k: getattr(args, k, None) for k in keys}
    tolerances = {
        name: getattr(args, f"tol_{name}")
        for name in DEFAULT_TOLERANCES
        if getattr(args, f"tol_{name}", None) is not None
    }
    if tolerances:
        out["tolerances"] = tolerances
    return out


def _failed(report, command: str) -> None:
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        raise VerificationFailure(", ".join(failed), stage=command)


def dispatch(args: argparse.Namespace) -> None:
    if args.command == "tb":
        service = TightBindingService(SpecRepository(), ArtifactRepository(args.output_dir))
        report = service.run(args.spec, args.grid, args.fermi, args.output_dir, args.expect_chern)
        print(f"tb: chern={report.chern.chern} gap={report.gap.gap:.6g} kahler={report.kahler_deviation:.6g}")
        print(f"artifacts: {args.output_dir}")
        _failed(report, args.command)
        return

    config = RunConfig.load(args.config, _overrides(args))
    artifacts = ArtifactRepository(config.output_dir)
    if args.command == "band":
        report = BandService(artifacts).run(config, save_projector=args.save_projector)
        print(f"band: level={report.level} chern={report.chern.chern} ok={report.ok}")
    elif args.command == "verify":
        report = VerifyService(artifacts).run(config, perturb=args.perturb)
        print(f"verify: checks={len(report.checks)} ok={report.ok}")
    else:
        report = RigidityService(artifacts).run(config, RigidityMode(args.mode), args.trials)
        print(f"rigidity: mode={report.mode} expected={report.expected} ok={report.ok}")
    print(f"artifacts: {config.output_dir}")
    _failed(report, args.command)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    init_logger(args.log_level)
    try:
        dispatch(args)
    except AppError as e:
        logger.debug("cli.error exit=%d", int(e.exit_code))
        print(str(e), file=sys.stderr)
        return int(e.exit_code)
    return int(ExitCode.OK)


if __name__ == "__main__":
    sys.exit(main())
