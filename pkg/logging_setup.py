"""
Logging setup: stdlib loggers rendered through structlog.

Library modules only ever call logging.getLogger(__name__); entry points call
configure_logging() once. Records go to stderr so stdout stays a clean payload.
"""

import logging
import sys

import structlog

from engine_config import EngineConfig

_HANDLER_NAME = 'ngon-stderr'


def _renderer(fmt: str):
    if fmt == 'json':
        return structlog.processors.JSONRenderer(sort_keys=True)
    return structlog.dev.ConsoleRenderer(colors=False)


def configure_logging(level: str = None, fmt: str = None) -> logging.Logger:
    """
    Install a single structlog-formatted stderr handler on the root logger

    Args:
        level: log level name; defaults to NGON_LOG_LEVEL
        fmt: 'console' or 'json'; defaults to NGON_LOG_FORMAT

    Returns:
        The configured root logger
    """
    level = (level or EngineConfig.log_level()).upper()
    fmt = fmt or EngineConfig.log_format()

    shared = [
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt='iso', utc=True),
    ]
    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared,
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            _renderer(fmt),
        ],
    )

    root = logging.getLogger()
    for handler in list(root.handlers):
        if handler.get_name() == _HANDLER_NAME:
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(formatter)
    root.addHandler(handler)
    root.setLevel(level)
    return root
