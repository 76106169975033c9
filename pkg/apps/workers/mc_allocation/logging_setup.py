"""Logging configuration utilities for the allocation CLI and library."""
import json
import logging
import sys

import click

from uvicorn.logging import DefaultFormatter

NOISY_LOGGERS = (
    "asyncio",
    "urllib3",
    "numpy",
    "scipy",
)

_configured = False
_configured_levels: tuple[str, str] | None = None

_STANDARD_KEYS = {
    "name",
    "msg",
    "args",
    "levelname",
    "levelno",
    "pathname",
    "filename",
    "module",
    "exc_info",
    "exc_text",
    "stack_info",
    "lineno",
    "funcName",
    "created",
    "msecs",
    "relativeCreated",
    "thread",
    "threadName",
    "processName",
    "process",
    "taskName",
    "message",
    "asctime",
    "levelprefix",
    "extra",
    "color_message",
}

_LEVEL_STYLES = {
    "DEBUG": {"fg": "cyan"},
    "INFO": {"fg": "green"},
    "WARNING": {"fg": "yellow"},
    "ERROR": {"fg": "red"},
    "CRITICAL": {"fg": "bright_red", "bold": True},
}


class ExtraFormatter(DefaultFormatter):
    """Uvicorn formatter that appends JSON-encoded extras if present."""

    def format(self, record: logging.LogRecord) -> str:  # type: ignore[override]
        record.extra = ""
        extras = {k: v for k, v in record.__dict__.items() if k not in _STANDARD_KEYS}
        if extras:
            try:
                extra_text = json.dumps(extras, ensure_ascii=False, default=str)
            except Exception:
                extra_text = str(extras)
            record.extra = " " + (click.style(extra_text, fg="bright_black") if self.use_colors else extra_text)
        return super().format(record)

    def color_level_name(self, level_name: str, level_no: int) -> str:
        style = _LEVEL_STYLES.get(level_name)
        if style is None:
            return level_name
        return click.style(level_name, **style)


def configure_logging(log_level: str, noisy_level: str) -> logging.Logger:
    """Configure root logger with uvicorn DefaultFormatter + JSON extras.

    Idempotent: subsequent calls with the same levels keep existing configuration.
    Logs go to stderr so stdout stays free for command output.
    """
    global _configured, _configured_levels
    if _configured and _configured_levels == (log_level, noisy_level):
        return logging.getLogger("mc_allocation")

    fmt = "%(levelprefix)s %(asctime)s %(name)s: %(message)s%(extra)s"
    formatter_kwargs = {"use_colors": sys.stderr.isatty(), "datefmt": "%H:%M:%S"}

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(ExtraFormatter(fmt, **formatter_kwargs))
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        handlers=[handler],
        force=True,
    )
    for noisy in NOISY_LOGGERS:
        logging.getLogger(noisy).setLevel(noisy_level.upper())
    _configured = True
    _configured_levels = (log_level, noisy_level)
    return logging.getLogger("mc_allocation")
