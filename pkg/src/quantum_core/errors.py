"""Exception hierarchy shared by every engine.

Each class carries the process exit code used by the command-line front end,
so callers translate errors without a lookup table.
"""
from typing import Optional


class SimulationError(Exception):
    exit_code = 3


# ---------------------------------------------------------------------------
# Input errors (exit 2)
# ---------------------------------------------------------------------------
class ConfigError(SimulationError):
    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if field:
            where.append(field)
        if line is not None:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ''
        super().__init__(prefix + message)


class ConfigMissingKeyError(ConfigError):
    pass


class ConfigTypeError(ConfigError):
    pass


class ConfigRangeError(ConfigError):
    pass


class ProfileError(SimulationError):
    exit_code = 2


class ProfileParseError(ProfileError):
    pass


class ProfileOrderError(ProfileError):
    pass


class ProfileRangeError(ProfileError):
    pass


class ModelParameterError(ProfileError):
    pass


# ---------------------------------------------------------------------------
# Numerical failures (exit 3)
# ---------------------------------------------------------------------------
class NumericalError(SimulationError):
    exit_code = 3


class ImpossibleOutcomeError(NumericalError):
    pass


class UncalibratableProfileError(NumericalError):
    pass


class IntegrationError(NumericalError):
    pass


class DegenerateDetuningsError(NumericalError):
    pass


class InconsistentMeasurementsError(NumericalError):
    pass


class NoWellConditionedSetError(NumericalError):
    pass


# ---------------------------------------------------------------------------
# Statistics (exit 4)
# ---------------------------------------------------------------------------
class InsufficientDataError(SimulationError):
    exit_code = 4

    def __init__(self, message: str, delta: Optional[float] = None):
        self.delta = delta
        super().__init__(message)
