"""Exception hierarchy. The CLI maps each family to an exit code."""


class CavityHardyError(Exception):
    """Base class for all package errors."""


class ConfigError(CavityHardyError, ValueError):
    """Invalid parameters or configuration (CLI exit code 2)."""

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems) if problems else [message]


class DomainError(ConfigError):
    """Argument outside the domain of a function."""


class NoSolution(CavityHardyError):
    """No parameter in the search range satisfies the amplitude condition (exit code 3)."""


class ImpossibleOutcome(CavityHardyError):
    """Post-selection on an outcome with vanishing probability (exit code 3)."""


class DegenerateState(CavityHardyError):
    """A closed-form normalization has a non-positive denominator (exit code 3)."""


class UndefinedConditional(CavityHardyError):
    """Conditioning event has (numerically) zero probability (exit code 3)."""


class NumericalError(CavityHardyError, ArithmeticError):
    """An iterative numerical method failed to converge (exit code 4)."""
