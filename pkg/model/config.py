# model/config.py
import json
from pathlib import Path
from typing import Any, Dict, Optional
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from config.settings import settings
from core.entities import ModularParameter
from util.enums import ErrorMessage
from util.errors import InputError
from util.functions import is_power_of_two

# Named pass/fail tolerances of the verification checks; --tol-<name> on the CLI.
DEFAULT_TOLERANCES: Dict[str, float] = {
    "wirtinger": 1e-8,
    "decomposition": 1e-8,
    "frenet": 1e-6,
    "recurrence": 1e-6,
    "ricci_integral": 1e-10,
    "reconstruction": 1e-5,
    "trace": 1e-5,
    "harmonicity": 1e-6,
    "harmonicity_control": 1e-3,
    "fidelity": 1e-8,
    "conjugation": 1e-7,
    "projective": 1e-6,
    "alignment": settings.ALIGNMENT_THRESHOLD,
    "kahler": 1e-6,
}


class RunConfig(BaseModel):
    """
    One workbench run. JSON config file first, CLI flags on top.
    """

    model_config = ConfigDict(extra="forbid")

    tau_re: float = 0.0
    tau_im: float = Field(default=1.0, gt=0)
    bands: int = Field(default=4, ge=3)
    grid: int = 128
    level: int = Field(default=0, ge=0)
    seed: int = 42
    tolerances: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_dir: str = settings.OUTPUT_DIR

    @field_validator("grid")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if v < 4 or not is_power_of_two(v):
            raise ValueError(f"grid must be a power of two >= 4, got {v}")
        return v

    @field_validator("tolerances")
    @classmethod
    def _merge_tolerances(cls, v: Dict[str, float]) -> Dict[str, float]:
        unknown = sorted(set(v) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise ValueError(f"unknown tolerances {unknown}")
        bad = sorted(k for k, x in v.items() if not x > 0)
        if bad:
            raise ValueError(f"tolerances must be positive: {bad}")
        return {**DEFAULT_TOLERANCES, **v}

    @model_validator(mode="after")
    def _level_in_range(self) -> "RunConfig":
        if self.level > self.bands - 1:
            raise ValueError(f"level must be in 0..{self.bands - 1}, got {self.level}")
        return self

    @property
    def tau(self) -> ModularParameter:
        return ModularParameter(complex(self.tau_re, self.tau_im))

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    @classmethod
    def load(
        cls, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
    ) -> "RunConfig":
        """
        Merge a JSON config file with explicit overrides (None values ignored).
        Tolerance overrides merge into the file's tolerance map.
        """
        raw: Dict[str, Any] = {}
        if path:
            try:
                raw = json.loads(Path(path).read_text(encoding="utf-8"))
            except FileNotFoundError as e:
                raise InputError(ErrorMessage.INVALID_CONFIG, f"config file not found: {path}") from e
            except json.JSONDecodeError as e:
                raise InputError(
                    ErrorMessage.INVALID_CONFIG, f"{path} line {e.lineno} col {e.colno}: {e.msg}"
                ) from e
            if not isinstance(raw, dict):
                raise InputError(ErrorMessage.INVALID_CONFIG, f"{path}: top level must be an object")
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key == "tolerances":
                raw["tolerances"] = {**raw.get("tolerances", {}), **value}
            else:
                raw[key] = value
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            parts = []
            for err in e.errors():
                loc = ".".join(str(x) for x in err.get("loc", []))
                parts.append(f"{loc}: {err.get('msg', '')}" if loc else err.get("msg", ""))
            raise InputError(ErrorMessage.INVALID_CONFIG, "; ".join(parts)) from e

    def inputs(self) -> Dict[str, Any]:
        """Hashable view of the run inputs (output_dir excluded)."""
        return self.model_dump(exclude={"output_dir"})
