# util/timing.py
import logging
import time
from contextlib import contextmanager
from typing import Any, Iterator


def _fmt(value: Any) -> str:
    if isinstance(value, complex):
        return f"{value.real:g}{value.imag:+g}j"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


@contextmanager
def timed(logger: logging.Logger, name: str, **kv: Any) -> Iterator[None]:
    """
    Usage:
      with timed(logger, "verify.chern", n=96, N=4):
          ...
    Emits one INFO on exit: "<name>.done ms=<int> key=val ..."
    A failing block logs "<name>.failed" at WARNING instead.
    """
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt_ms = int((time.perf_counter() - t0) * 1000)
        suffix = "".join(f" {k}={_fmt(v)}" for k, v in kv.items())
        if ok:
            logger.info("%s.done ms=%d%s", name, dt_ms, suffix)
        else:
            logger.warning("%s.failed ms=%d%s", name, dt_ms, suffix)
