"""Exception types shared across the toolkit."""


class WaveforceError(Exception):
    """Base class for all toolkit errors."""


class InputError(WaveforceError):
    """Malformed or non-finite input data."""


class UnidirectionalityViolation(WaveforceError):
    """The relative flow stagnates or reverses (h_p <= 0 somewhere)."""


class BracketError(WaveforceError):
    """A bracketing search found no sign change on its interval."""


class SolverError(WaveforceError):
    """An algebraic solver (eigenproblem, linear system) failed."""


class InvariantViolation(WaveforceError):
    """A checked mathematical invariant failed beyond tolerance."""


class ConvergenceError(WaveforceError):
    """Newton iteration failed to converge within the iteration budget."""


class TailNotResolved(WaveforceError):
    """A solitary-wave tail is still too large at the truncation boundary."""


class FitError(WaveforceError):
    """A decay-rate fit was rejected (non-monotone or sign-changing tail)."""


class DomainError(WaveforceError):
    """An argument lies outside the mathematical domain of an identity."""


class ConfigError(WaveforceError):
    """A run configuration is missing keys or fails validation."""
