# controller/workbench_controller.py
from fastapi import APIRouter, Depends
from controller.controller_dependencies import (
    get_band_service,
    get_rigidity_service,
    get_spec_repository,
    get_tight_binding_service,
    get_verify_service,
)
from model.api import (
    BandRequest,
    BundledModelsResponse,
    RigidityRequest,
    TightBindingRequest,
    VerifyRequest,
)
from model.config import RunConfig
from model.reports import BandReport, RigidityReport, TightBindingReport, VerifyReport
from repository.spec_repository import SpecRepository
from service.band_service import BandService
from service.rigidity_service import RigidityService
from service.tight_binding_service import TightBindingService
from service.verify_service import VerifyService
from util.constants import InternalURIs

workbench_router = APIRouter()


def _config(payload: RunConfig) -> RunConfig:
    return RunConfig.model_validate(payload.model_dump(include=set(RunConfig.model_fields)))


# Sync handlers: FastAPI runs them in its threadpool, the numerics are CPU bound.
@workbench_router.post(InternalURIs.BAND, response_model=BandReport)
def band(payload: BandRequest, service: BandService = Depends(get_band_service)) -> BandReport:
    return service.compute(_config(payload)).report


@workbench_router.post(InternalURIs.VERIFY, response_model=VerifyReport)
def verify(payload: VerifyRequest, service: VerifyService = Depends(get_verify_service)) -> VerifyReport:
    return service.compute(_config(payload), perturb=payload.perturb).report


@workbench_router.post(InternalURIs.RIGIDITY, response_model=RigidityReport)
def rigidity(
    payload: RigidityRequest, service: RigidityService = Depends(get_rigidity_service)
) -> RigidityReport:
    return service.compute(_config(payload), payload.mode, payload.trials)


@workbench_router.post(InternalURIs.TIGHT_BINDING, response_model=TightBindingReport)
def tight_binding(
    payload: TightBindingRequest,
    service: TightBindingService = Depends(get_tight_binding_service),
) -> TightBindingReport:
    report, _ = service.compute(payload.spec, payload.grid, payload.fermi, payload.expect_chern)
    return report


@workbench_router.get(InternalURIs.BUNDLED_MODELS, response_model=BundledModelsResponse)
def bundled_models(specs: SpecRepository = Depends(get_spec_repository)) -> BundledModelsResponse:
    return BundledModelsResponse(models=specs.bundled())
