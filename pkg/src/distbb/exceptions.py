"""Exception hierarchy shared by all modules."""


class DistBBError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(DistBBError, ValueError):
    """Inputs have inconsistent dimensions or out-of-range values."""


class ConfigParseError(ConfigurationError):
    """An experiment configuration document could not be parsed.

    The offending key is kept on ``key`` so callers can report it.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(message if key is None else f"{key}: {message}")


class NumericError(DistBBError, ArithmeticError):
    """An iterative numerical routine failed."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class SingularityError(NumericError):
    """A matrix expected to be positive definite is not."""

    def __init__(self, message, lambda_min=None):
        self.lambda_min = lambda_min
        super().__init__(message, residual=lambda_min)


class NotStronglyConvexError(ConfigurationError):
    """Smallest Hessian eigenvalue is too small for strong convexity."""

    def __init__(self, mu):
        self.mu = mu
        super().__init__(f"objective is not strongly convex (mu={mu!r})")


class GenerationError(DistBBError, RuntimeError):
    """A random graph or weight matrix generator gave up."""


class DivergenceError(NumericError):
    """A solver produced a non-finite iterate."""

    def __init__(self, iteration, agent=None):
        self.iteration = iteration
        self.agent = agent
        where = f" at agent {agent}" if agent is not None else ""
        super().__init__(f"non-finite iterate at iteration {iteration}{where}")


class InvalidSpectrumError(ConfigurationError):
    """Mixing spectrum is outside the range where a bound is defined."""


class InsufficientDataError(ConfigurationError):
    """Too few records to draw a conclusion."""


class UsageError(ConfigurationError):
    """Unknown command-line verb or preset name."""


class VerificationError(DistBBError, AssertionError):
    """A run finished but did not show the behaviour it is meant to certify."""
