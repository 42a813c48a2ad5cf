"""
Engine Configuration
Central constants for the n-gon engine, with environment overrides
"""

import os
import logging

from dotenv import load_dotenv

from errors import EnvelopeExceeded

load_dotenv()

logger = logging.getLogger(__name__)


class EngineConfig:
    """Configuration management for the engine"""

    ENV_PREFIX = "NGON_"

    # Design envelope for subset enumerations (2^n pieces)
    MAX_EDGES = 10

    # Integrator
    DEFAULT_TOL = 1e-8
    ADAPTIVE_MAX_DIMENSION = 6
    ADAPTIVE_MAX_SUBDIVISIONS = 20000
    ADAPTIVE_RULES = {1: 'gk21'}
    ADAPTIVE_DEFAULT_RULE = 'genz-malik'

    DEFAULT_QMC_TOL = 1e-3
    QMC_SHIFTS = 16
    QMC_MIN_SHIFTS = 16
    QMC_POINTS_LOG2 = 15
    DEFAULT_SEED = 0

    # realize_momenta residual bound
    REALIZE_TOL = 1e-9

    METHOD_ALIASES = {
        'quad': 'quad',
        'adaptive-quadrature': 'quad',
        'mc': 'mc',
        'qmc': 'mc',
        'quasi-monte-carlo': 'mc',
    }

    LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
    LOG_FORMATS = ('console', 'json')

    @classmethod
    def _env(cls, name: str):
        return os.getenv(cls.ENV_PREFIX + name)

    @classmethod
    def _env_int(cls, name: str, default: int, minimum: int = 1) -> int:
        raw = cls._env(name)
        if raw is None or raw == '':
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{cls.ENV_PREFIX}{name} must be an integer, got {raw!r}")
        if value < minimum:
            raise ValueError(f"{cls.ENV_PREFIX}{name} must be >= {minimum}, got {value}")
        return value

    @classmethod
    def log_level(cls) -> str:
        """Log level from NGON_LOG_LEVEL (default WARNING)"""
        level = (cls._env('LOG_LEVEL') or 'WARNING').upper()
        if level not in cls.LOG_LEVELS:
            raise ValueError(f"{cls.ENV_PREFIX}LOG_LEVEL must be one of {cls.LOG_LEVELS}, got {level!r}")
        return level

    @classmethod
    def log_format(cls) -> str:
        fmt = (cls._env('LOG_FORMAT') or 'console').lower()
        if fmt not in cls.LOG_FORMATS:
            raise ValueError(f"{cls.ENV_PREFIX}LOG_FORMAT must be one of {cls.LOG_FORMATS}, got {fmt!r}")
        return fmt

    @classmethod
    def max_edges(cls) -> int:
        return cls._env_int('MAX_EDGES', cls.MAX_EDGES)

    @classmethod
    def check_edge_envelope(cls, n: int, what: str) -> None:
        """Raise EnvelopeExceeded when an enumeration over n edges is out of range"""
        limit = cls.max_edges()
        if n > limit:
            raise EnvelopeExceeded(f"{what} enumerates 2^{n} edge subsets; the envelope is n <= {limit} ({cls.ENV_PREFIX}MAX_EDGES)")

    @classmethod
    def max_subdivisions(cls) -> int:
        return cls._env_int('MAX_SUBDIVISIONS', cls.ADAPTIVE_MAX_SUBDIVISIONS)

    @classmethod
    def qmc_shifts(cls) -> int:
        return cls._env_int('QMC_SHIFTS', cls.QMC_SHIFTS, minimum=cls.QMC_MIN_SHIFTS)

    @classmethod
    def qmc_points_log2(cls) -> int:
        return cls._env_int('QMC_POINTS_LOG2', cls.QMC_POINTS_LOG2)

    @classmethod
    def default_tol(cls) -> float:
        raw = cls._env('DEFAULT_TOL')
        if raw is None or raw == '':
            return cls.DEFAULT_TOL
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"{cls.ENV_PREFIX}DEFAULT_TOL must be a float, got {raw!r}")
        if not value > 0:
            raise ValueError(f"{cls.ENV_PREFIX}DEFAULT_TOL must be positive, got {value}")
        return value

    @classmethod
    def normalize_method(cls, name: str) -> str:
        """Map a method name or alias onto 'quad' or 'mc'"""
        key = (name or '').strip().lower()
        if key not in cls.METHOD_ALIASES:
            raise ValueError(f"Unknown integration method: {name!r} (expected one of {sorted(cls.METHOD_ALIASES)})")
        return cls.METHOD_ALIASES[key]

    @classmethod
    def adaptive_rule(cls, dimension: int) -> str:
        """Cubature rule for a parametric cube of the given dimension"""
        return cls.ADAPTIVE_RULES.get(dimension, cls.ADAPTIVE_DEFAULT_RULE)
