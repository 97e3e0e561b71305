# util/constants.py
from typing import Final

TOOL_NAME: Final[str] = "harmonic-bands-workbench"
TOOL_VERSION: Final[str] = "0.1.0"


class InternalURIs:
    API = "/api"
    V1 = API + "/v1"
    BAND = V1 + "/band"
    VERIFY = V1 + "/verify"
    RIGIDITY = V1 + "/rigidity"
    TIGHT_BINDING = V1 + "/tight-binding"
    BUNDLED_MODELS = V1 + "/models"
