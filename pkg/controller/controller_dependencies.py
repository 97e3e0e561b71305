# controller/controller_dependencies.py
from repository.spec_repository import SpecRepository
from service.band_service import BandService
from service.rigidity_service import RigidityService
from service.tight_binding_service import TightBindingService
from service.verify_service import VerifyService


# HTTP runs compute reports only; nothing is written under OUTPUT_DIR.
def get_band_service() -> BandService:
    return BandService()


def get_verify_service() -> VerifyService:
    return VerifyService()


def get_rigidity_service() -> RigidityService:
    return RigidityService()


def get_spec_repository() -> SpecRepository:
    return SpecRepository()


def get_tight_binding_service() -> TightBindingService:
    _specs = get_spec_repository()
    _service = TightBindingService(_specs)
    return _service
