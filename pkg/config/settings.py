# config/settings.py
import os
import sys
from dotenv import load_dotenv
from pydantic import ValidationError, Field
from pydantic_settings import BaseSettings
from util.enums import Environment, ExitCode


if os.getenv("APP_ENV", Environment.DEV) == Environment.DEV:
    load_dotenv()


class Settings(BaseSettings):
    # App
    APP_ENV: str = Field(default=Environment.DEV.value, validation_alias="APP_ENV")
    OUTPUT_DIR: str = Field(default="runs", validation_alias="OUTPUT_DIR")
    HOST: str = Field(default="127.0.0.1", validation_alias="HOST")
    PORT: int = Field(default=8000, validation_alias="PORT")
    ALLOWED_ORIGIN: str = Field(default="*", validation_alias="ALLOWED_ORIGIN")

    # Theta series
    THETA_TOL: float = Field(default=1e-14, validation_alias="THETA_TOL")
    THETA_MAX_CUTOFF: int = Field(default=64, validation_alias="THETA_MAX_CUTOFF")

    # Frames & projectors
    RANK_TOL: float = Field(default=1e-10, validation_alias="RANK_TOL")
    PROJECTOR_TOL: float = Field(default=1e-8, validation_alias="PROJECTOR_TOL")
    HYPERFLEX_TOL: float = Field(default=1e-6, validation_alias="HYPERFLEX_TOL")

    # Topology & curvature
    LINK_MIN_MODULUS: float = Field(default=1e-6, validation_alias="LINK_MIN_MODULUS")
    CHERN_MIN_GRID: int = Field(default=16, validation_alias="CHERN_MIN_GRID")
    POSITIVITY_FLOOR: float = Field(default=1e-12, validation_alias="POSITIVITY_FLOOR")

    # Rigidity
    ALIGNMENT_THRESHOLD: float = Field(
        default=1e-6, validation_alias="ALIGNMENT_THRESHOLD"
    )
    EIGENGAP_TOL: float = Field(default=1e-8, validation_alias="EIGENGAP_TOL")
    SAMPLE_FACTOR: int = Field(default=8, validation_alias="SAMPLE_FACTOR")

    # Tight binding
    GAP_THRESHOLD: float = Field(default=1e-6, validation_alias="GAP_THRESHOLD")

    # Logging knobs
    LOGGER_NAME: str = "harmonic-bands"
    LOG_LEVEL: str = Field(default="INFO", validation_alias="LOG_LEVEL")
    LOG_TO_FILE: bool = Field(default=False, validation_alias="LOG_TO_FILE")
    LOG_DIR: str = Field(default="logs", validation_alias="LOG_DIR")
    LOG_FILE_NAME: str = Field(default="workbench.log", validation_alias="LOG_FILE_NAME")
    LOG_MAX_BYTES: int = Field(
        default=50 * 1024 * 1024, validation_alias="LOG_MAX_BYTES"
    )
    LOG_BACKUP_COUNT: int = Field(default=5, validation_alias="LOG_BACKUP_COUNT")


try:
    settings = Settings()
except ValidationError as e:
    print("❌ Missing/invalid environment variables:", file=sys.stderr)
    for err in e.errors():
        loc = ".".join(str(x) for x in err.get("loc", []))
        msg = err.get("msg", "")
        print(f" - {loc}: {msg}", file=sys.stderr)
    sys.exit(ExitCode.INPUT_ERROR)
except Exception as e:
    print(f"❌ Settings initialization failed: {e}", file=sys.stderr)
    sys.exit(ExitCode.INPUT_ERROR)
