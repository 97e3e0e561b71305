# util/errors.py
from contextlib import contextmanager
from typing import Iterator, Optional
import numpy as np
import scipy.linalg
from util.enums import ErrorMessage, ExitCode


class AppError(Exception):
    # Flow: raise an AppError subclass; the CLI maps exit_code, the HTTP layer http_status.
    def __init__(
        self, error: ErrorMessage, detail: str = "", stage: Optional[str] = None
    ) -> None:
        self.error = error
        self.detail = detail
        self.stage = stage
        super().__init__(str(self))

    @property
    def message(self) -> str:
        return self.error.value.message

    @property
    def exit_code(self) -> ExitCode:
        return self.error.value.exit_code

    @property
    def http_status(self) -> int:
        return self.error.value.http_status

    def __str__(self) -> str:
        head = f"[{self.stage}] " if self.stage else ""
        tail = f": {self.detail}" if self.detail else ""
        return f"{head}{self.message}{tail}"


class InputError(AppError):
    pass


class GapClosureError(InputError):
    pass


class ResolutionError(AppError):
    pass


class VerificationFailure(AppError):
    def __init__(self, detail: str = "", stage: Optional[str] = None) -> None:
        super().__init__(ErrorMessage.VERIFICATION_FAILED, detail, stage)


@contextmanager
def stage(name: str) -> Iterator[None]:
    """
    Tag errors raised inside the block with the pipeline stage name.
    Linear algebra failures surface as ResolutionError.
    """
    try:
        yield
    except AppError as e:
        if e.stage is None:
            e.stage = name
        raise
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise ResolutionError(ErrorMessage.LINALG_FAILURE, str(e), stage=name) from e
