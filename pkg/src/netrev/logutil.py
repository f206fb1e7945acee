"""Channel-tagged logging: every line carries its channel and severity.

Module loggers are named ``netrev.<channel>``; the CLI and service attach a
stderr handler here and optionally filter to explicit channels.
"""

from __future__ import annotations

import logging
import sys

ROOT = "netrev"


class _ChannelFormatter(logging.Formatter):
    def format(self, record):
        channel = record.name.split(".", 1)[1] if "." in record.name else record.name
        record.channel = channel
        return f"[{channel}] {record.levelname}: {record.getMessage()}"


class _ChannelFilter(logging.Filter):
    def __init__(self, channels):
        super().__init__()
        self.channels = set(channels)

    def filter(self, record):
        channel = record.name.split(".", 1)[1] if "." in record.name else record.name
        return channel in self.channels


def configure_logging(level: str = "INFO", channels: list[str] | None = None,
                      stream=None) -> logging.Handler:
    """Install (or replace) the stderr handler on the package logger."""
    root = logging.getLogger(ROOT)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(_ChannelFormatter())
    if channels:
        handler.addFilter(_ChannelFilter(channels))
    root.addHandler(handler)
    root.propagate = False
    return handler
