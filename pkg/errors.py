"""
Shared exception base for the n-gon engine.

Every domain error raised by the library derives from EngineError so callers
(the CLI in particular) can separate domain failures from usage mistakes.
"""


class EngineError(Exception):
    """Base class for all domain errors raised by the engine"""
    pass


class EnvelopeExceeded(EngineError):
    """A subset enumeration was requested for more edges than MAX_EDGES"""
    pass
