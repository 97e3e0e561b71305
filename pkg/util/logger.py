# util/logger.py
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional, TextIO
from config.settings import settings

logging.captureWarnings(True)

_TEXT_FMT = "%(asctime)s %(levelname)s %(name)s - %(message)s"
_DATE_FMT = "%Y-%m-%dT%H:%M:%S%z"


class ColoredFormatter(logging.Formatter):
    COLORS = {
        "DEBUG": "\033[37m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[41m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        # Copy so file handlers sharing the record keep the plain level name
        colored = logging.makeLogRecord(record.__dict__)
        lvl = record.levelname
        colored.levelname = f"{self.COLORS.get(lvl, self.RESET)}{lvl}{self.RESET}"
        return super().format(colored)


def _console_handler(stream: TextIO, level: int) -> logging.Handler:
    ch = logging.StreamHandler(stream)
    ch.setLevel(level)
    use_color = hasattr(stream, "isatty") and stream.isatty()
    ch.setFormatter(
        ColoredFormatter(_TEXT_FMT, datefmt=_DATE_FMT)
        if use_color
        else logging.Formatter(_TEXT_FMT, datefmt=_DATE_FMT)
    )
    return ch


def _file_handler(level: int) -> logging.Handler:
    os.makedirs(settings.LOG_DIR, exist_ok=True)
    fh = RotatingFileHandler(
        os.path.join(settings.LOG_DIR, settings.LOG_FILE_NAME),
        maxBytes=settings.LOG_MAX_BYTES,
        backupCount=settings.LOG_BACKUP_COUNT,
        encoding="utf-8",
    )
    fh.setLevel(level)
    fh.setFormatter(logging.Formatter(_TEXT_FMT, datefmt=_DATE_FMT))
    return fh


def init_logger(
    level: Optional[str] = None, stream: Optional[TextIO] = None
) -> logging.Logger:
    """
    Idempotent logger init:
    - Console handler on `stream` (stderr by default so CLI stdout stays clean).
    - Rotating file handler only when settings.LOG_TO_FILE is True.
    - `level` overrides settings.LOG_LEVEL (the CLI --log-level flag).
    """
    root = logging.getLogger()
    if getattr(root, "_harmonic_inited", False):
        return logging.getLogger(settings.LOGGER_NAME)

    name = (level or settings.LOG_LEVEL or "INFO").upper()
    lvl = getattr(logging, name, logging.INFO)
    root.setLevel(lvl)

    for h in list(root.handlers):
        root.removeHandler(h)

    root.addHandler(_console_handler(stream or sys.stderr, lvl))
    if settings.LOG_TO_FILE:
        root.addHandler(_file_handler(lvl))

    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("uvicorn.error").setLevel(logging.INFO)
    logging.getLogger("uvicorn.access").setLevel(logging.WARNING)

    root._harmonic_inited = True  # type: ignore[attr-defined]
    logger = logging.getLogger(settings.LOGGER_NAME)
    logger.debug("logger.init level=%s file=%s", name, settings.LOG_TO_FILE)
    return logger
