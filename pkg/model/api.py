# model/api.py
from typing import List, Optional
from pydantic import BaseModel, Field
from model.config import RunConfig
from util.enums import RigidityMode


class BandRequest(RunConfig):
    pass


class VerifyRequest(RunConfig):
    perturb: bool = False


class RigidityRequest(RunConfig):
    mode: RigidityMode = RigidityMode.SEED
    trials: int = Field(default=20, ge=1, le=100)


class TightBindingRequest(BaseModel):
    spec: str = Field(min_length=1, description="bundled model name or inline hopping-spec JSON")
    fermi: float = 0.0
    grid: int = Field(default=64, ge=16, le=512)
    expect_chern: Optional[int] = None


class BundledModelsResponse(BaseModel):
    models: List[str]


class ErrorResponse(BaseModel):
    ok: bool = False
    stage: str | None = None
    error: str
    message: str
