# repository/namespaces.py
from pathlib import Path
from typing import Final

ROOT: Final[Path] = Path(__file__).resolve().parent.parent

BUNDLED_MODELS_DIR: Final[Path] = ROOT / "data" / "models"

# Artifact file names under the run's output_dir
MANIFEST: Final[str] = "manifest.json"
BASIS: Final[str] = "basis.json"
PROJECTOR: Final[str] = "projector.json"
QGT_CSV: Final[str] = "qgt.csv"
WIRTINGER_CSV: Final[str] = "wirtinger.csv"
CHERN: Final[str] = "chern.json"
WIRTINGER: Final[str] = "wirtinger.json"
BAND_REPORT: Final[str] = "band.json"
VERDICT: Final[str] = "verdict.json"
RECURRENCE: Final[str] = "recurrence.json"
TWO_FORMS_CSV: Final[str] = "two_form_{j}.csv"
TWO_FORMS_JSON: Final[str] = "two_form_{j}.json"
RECONSTRUCTED_CSV: Final[str] = "reconstructed_{k}_two_form_{j}.csv"
RIGIDITY_REPORT: Final[str] = "rigidity.json"
RECOVERY: Final[str] = "recovery.json"
GAP: Final[str] = "gap.json"
TIGHT_BINDING_REPORT: Final[str] = "tight_binding.json"
