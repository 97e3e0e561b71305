# repository/spec_repository.py
import logging
from pathlib import Path
from typing import List, Union
from core.entities import HoppingSpec
from core.tight_binding import parse_hopping_spec
from repository.namespaces import BUNDLED_MODELS_DIR
from util.enums import ErrorMessage
from util.errors import InputError

logger = logging.getLogger(__name__)


class SpecRepository:
    """
    Hopping specs by reference: an inline JSON document, a file path, or the name of
    a bundled model under data/models (with or without the .json suffix).
    """

    def __init__(self, bundled_dir: Union[str, Path] = BUNDLED_MODELS_DIR) -> None:
        self._bundled = Path(bundled_dir)

    def bundled(self) -> List[str]:
        if not self._bundled.is_dir():
            return []
        return sorted(p.stem for p in self._bundled.glob("*.json"))

    def read(self, ref: str) -> str:
        if ref.lstrip().startswith("{"):
            return ref
        path = Path(ref)
        if path.is_file():
            logger.debug("spec.read path=%s", path)
            return path.read_text(encoding="utf-8")
        name = ref[:-5] if ref.endswith(".json") else ref
        candidate = self._bundled / f"{name}.json"
        if candidate.is_file():
            logger.debug("spec.read bundled=%s", name)
            return candidate.read_text(encoding="utf-8")
        raise InputError(
            ErrorMessage.SPEC_NOT_FOUND,
            f"{ref!r} is neither a file nor a bundled model ({', '.join(self.bundled())})",
        )

    def load(self, ref: str) -> HoppingSpec:
        return parse_hopping_spec(self.read(ref))
