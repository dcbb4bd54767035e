# core/errors.py v1.0.0
"""Exception hierarchy shared by every simulator module."""


class SimulationError(Exception):
    """Base class for all errors raised by the simulator."""


class ParameterError(SimulationError, ValueError):
    """An operation received arguments outside its domain."""


class ConfigError(ParameterError):
    """An experiment config file is malformed or inconsistent."""


class LogCorruptionError(SimulationError):
    """Transmission events were delivered out of path order."""


class UndefinedMetricError(SimulationError):
    """A metric has no defined value for the given input (no reachable pair, zero variance)."""


class ConnectivityError(SimulationError):
    """No strongly connected layout was found within the retry budget."""
