# util/functions.py
import hashlib
import json
import math
import re
from typing import Any

import numpy as np
from pydantic import BaseModel


def format_float(x: float) -> str:
    """
    - Fixed 17-significant-digit rendering so identical runs give identical bytes.
    - Non-finite values have no JSON literal; callers map them to null.
    """
    return format(float(x), ".17g")


def stable_dumps(obj: Any, indent: int = 2) -> str:
    """
    Deterministic JSON through json.dumps: sorted keys, 17-digit floats, NaN/inf as null.
    Accepts numpy scalars and arrays and pydantic models.
    """
    text = json.dumps(_prepare(obj), sort_keys=True, indent=indent, ensure_ascii=False, allow_nan=False)
    return _FLOAT_SLOT.sub(r"\1", text) + "\n"


# json.dumps renders floats by repr; finite floats travel as marked strings instead
_FLOAT_MARK = "\x00float:"
_FLOAT_SLOT = re.compile(r'"\\u0000float:([^"]*)"')


def _prepare(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return _prepare(obj.model_dump(mode="python"))
    if isinstance(obj, np.ndarray):
        return _prepare(obj.tolist())
    if isinstance(obj, np.generic):
        return _prepare(obj.item())
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return _FLOAT_MARK + format_float(obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def config_hash(payload: dict) -> str:
    return hashlib.sha256(stable_dumps(payload).encode("utf-8")).hexdigest()


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0
