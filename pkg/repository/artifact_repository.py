# repository/artifact_repository.py
import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Union
import numpy as np
from config.settings import settings
from core.entities import PeriodicScalarField, QGTField, TwoFormField
from repository.namespaces import MANIFEST
from util.constants import TOOL_NAME, TOOL_VERSION
from util.functions import config_hash, format_float, stable_dumps

logger = logging.getLogger(__name__)


class ArtifactRepository:
    """
    Run artifacts under one output directory.

    Every write goes to a temp file in the same directory and is moved into place
    with os.replace, so readers never see a partial file. Written names are
    remembered for the manifest.
    """

    def __init__(self, root: Union[str, Path] = settings.OUTPUT_DIR) -> None:
        self._root = Path(root)
        self._written: List[str] = []

    @property
    def root(self) -> Path:
        return self._root

    @property
    def written(self) -> List[str]:
        return sorted(set(self._written))

    def _path(self, name: str) -> Path:
        return self._root / name

    def write_text(self, name: str, text: str) -> Path:
        self._root.mkdir(parents=True, exist_ok=True)
        target = self._path(name)
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", suffix=".tmp", dir=self._root)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, target)
        except Exception:
            logger.error("artifact.write.error name=%s", name)
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self._written.append(name)
        logger.debug("artifact.write name=%s bytes=%d", name, len(text))
        return target

    def write_json(self, name: str, payload: Any) -> Path:
        return self.write_text(name, stable_dumps(payload))

    def write_field_csv(self, name: str, field: Union[TwoFormField, PeriodicScalarField]) -> Path:
        """Rows `k1,k2,value`, k1 varying fastest."""
        values = field.w if isinstance(field, TwoFormField) else field.values
        return self.write_text(name, _grid_csv(field.grid.n, {"value": values}))

    def write_field_json(self, name: str, field: Union[TwoFormField, PeriodicScalarField]) -> Path:
        """{"n": n, "values": [[…]]} with values[i1][i2], the array layout."""
        values = field.w if isinstance(field, TwoFormField) else field.values
        return self.write_json(name, {"n": field.grid.n, "values": np.real(values).tolist()})

    def write_qgt_csv(self, name: str, q: QGTField) -> Path:
        columns = {"g11": q.g11, "g12": q.g12, "g22": q.g22, "w12": q.w12}
        return self.write_text(name, _grid_csv(q.grid.n, columns))

    def write_manifest(self, command: str, inputs: Dict[str, Any]) -> Path:
        """Lists inputs, tool version, config hash and every artifact written so far."""
        manifest = {
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": command,
            "inputs": inputs,
            "config_hash": config_hash({"command": command, "inputs": inputs}),
            "artifacts": [a for a in self.written if a != MANIFEST],
        }
        path = self.write_json(MANIFEST, manifest)
        logger.info("artifact.manifest dir=%s artifacts=%d", self._root, len(manifest["artifacts"]))
        return path

    def read_text(self, name: str) -> str:
        return self._path(name).read_text(encoding="utf-8")


def _grid_csv(n: int, columns: Dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k1", "k2", *columns])
    for i2 in range(n):
        for i1 in range(n):
            row = [format_float(i1 / n), format_float(i2 / n)]
            row.extend(format_float(float(col[i1, i2].real)) for col in columns.values())
            writer.writerow(row)
    return buf.getvalue()
