"""
Error Types
Exceptions raised by the ring-walk computation modules
"""

from typing import Any, Optional, Tuple


class RingWalkError(Exception):
    """Base class for every error raised by this package"""

    kind = "computation"


class ConfigError(RingWalkError, ValueError):
    """Invalid walk or experiment configuration"""

    kind = "config"

    def __init__(self, key: str, message: str, line: Optional[int] = None):
        """
        Args:
            key: Name of the offending configuration key
            message: Human readable description of the problem
            line: Line number in the config file, when the value came from one
        """
        self.key = key
        self.message = message
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{key}: {message}{where}")


class BudgetError(RingWalkError, ValueError):
    """Observation budget allows no detection attempt"""

    kind = "budget"


class DecompositionError(RingWalkError):
    """Eigensolver failed on a Perron-Frobenius operator"""

    kind = "decomposition"

    def __init__(
        self,
        config: Any,
        message: str,
        coordinates: Optional[Tuple[float, float]] = None,
    ):
        self.config = config
        self.coordinates = coordinates
        where = f" at (phi, tau) = {coordinates}" if coordinates else ""
        super().__init__(f"{message}{where} for {config}")


class NotDarkError(RingWalkError):
    """Pair of levels does not produce a dark state"""

    kind = "not-dark"


class DegenerateDenominatorError(RingWalkError, ZeroDivisionError):
    """Phase-matching formula undefined for this pair"""

    kind = "degenerate-denominator"
