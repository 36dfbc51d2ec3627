"""
Exception hierarchy mapped to CLI exit statuses in app.main
"""
from app.models import ExitStatus


class IcsFuzzError(Exception):
    exit_status: ExitStatus = ExitStatus.INTERNAL_ERROR


class ConfigError(IcsFuzzError):
    exit_status = ExitStatus.CONFIG_ERROR


class InvalidSeedError(ConfigError):
    """Seed scenario does not produce the contact it promises"""


class ResultIOError(IcsFuzzError):
    exit_status = ExitStatus.IO_ERROR


class InvariantViolation(IcsFuzzError):
    exit_status = ExitStatus.INTERNAL_ERROR


class SimulationError(InvariantViolation):
    """Non-finite actor state; always a configuration bug upstream"""


class SweepExhausted(Exception):
    """Raised by mutate_step when a step would leave the parameter range"""
