# util/enums.py
from enum import Enum, IntEnum
from typing import NamedTuple
from fastapi import status


class Color(str, Enum):
    RESET = "\033[0m"
    RED = "\033[31m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    BLUE = "\033[34m"
    BOLD = "\033[1m"

    def __str__(self):
        return self.value


class Environment(str, Enum):
    DEV = "dev"
    PROD = "prod"


class ExitCode(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 2
    INPUT_ERROR = 3
    RESOLUTION_ERROR = 4


class RigidityMode(str, Enum):
    SEED = "seed"
    CROSS_TAU = "cross-tau"
    TRANSLATION = "translation"


class ErrorInfo(NamedTuple):
    message: str
    exit_code: ExitCode
    http_status: int


_INPUT = (ExitCode.INPUT_ERROR, status.HTTP_422_UNPROCESSABLE_ENTITY)
_RESOLUTION = (ExitCode.RESOLUTION_ERROR, status.HTTP_409_CONFLICT)


class ErrorMessage(Enum):
    # Input errors (exit 3)
    INVALID_CONFIG = ErrorInfo("Invalid run configuration", *_INPUT)
    INVALID_TAU = ErrorInfo("Modular parameter needs Im(tau) > 0", *_INPUT)
    GRID_TOO_SMALL = ErrorInfo("Grid too small", *_INPUT)
    LEVEL_OUT_OF_RANGE = ErrorInfo("Level index out of range", *_INPUT)
    INVALID_ORDER = ErrorInfo("Jet order out of range", *_INPUT)
    SHAPE_MISMATCH = ErrorInfo("Field shapes do not match", *_INPUT)
    PROJECTOR_INVARIANT = ErrorInfo("Projector invariant violated", *_INPUT)
    MALFORMED_SPEC = ErrorInfo("Malformed hopping spec", *_INPUT)
    HERMITICITY_CONFLICT = ErrorInfo("Hermiticity conflict in hopping spec", *_INPUT)
    SPEC_NOT_FOUND = ErrorInfo("Hopping spec not found", *_INPUT)
    GAP_CLOSURE = ErrorInfo("Gap closes at the Fermi level", *_INPUT)
    RANK_CHANGE = ErrorInfo("Occupied rank changes across the grid", *_INPUT)

    # Numerical resolution errors (exit 4)
    THETA_CUTOFF = ErrorInfo("Theta series tolerance unreachable", *_RESOLUTION)
    ZERO_LIFT = ErrorInfo("Lift vanished at a grid point", *_RESOLUTION)
    RANK_DEFICIENT = ErrorInfo("Jet matrix numerically rank deficient", *_RESOLUTION)
    LINK_MODULUS = ErrorInfo("Plaquette link modulus below threshold", *_RESOLUTION)
    NONPOSITIVE_FORM = ErrorInfo("Two-form not strictly positive", *_RESOLUTION)
    DEGENERATE_EIGENSPACE = ErrorInfo("Lowest eigenspace is degenerate", *_RESOLUTION)
    SINGULAR_RECOVERY = ErrorInfo("Recovered matrix is rank deficient", *_RESOLUTION)
    LINALG_FAILURE = ErrorInfo("Linear algebra routine failed", *_RESOLUTION)

    # Verdicts (exit 2)
    VERIFICATION_FAILED = ErrorInfo(
        "Verification failed", ExitCode.VERIFICATION_FAILED, status.HTTP_200_OK
    )
