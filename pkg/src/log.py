"""Logging setup with the bracketed component prefix used across the package."""

import logging
import sys


class ComponentFormatter(logging.Formatter):
    """Format records as ``[component] message`` using the last logger name part."""

    def format(self, record: logging.LogRecord) -> str:
        component = record.name.rsplit(".", 1)[-1]
        message = super().format(record)
        return f"[{component}] {message}"


class StderrHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stderr`` is at emit time."""

    def emit(self, record: logging.LogRecord) -> None:
        self.stream = sys.stderr
        super().emit(record)


def configure_logging(debug: bool = False) -> None:
    """Route package logs to stderr; ``debug`` lowers the level to DEBUG."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_regstruct", False):
            root.removeHandler(handler)
    handler = StderrHandler()
    handler.setFormatter(ComponentFormatter("%(message)s"))
    handler._regstruct = True  # type: ignore[attr-defined]
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if debug else logging.WARNING)
