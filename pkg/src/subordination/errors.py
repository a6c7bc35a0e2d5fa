"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a function (negative radius, t <= 0, ...)."""


class DivergenceError(ArithmeticError):
    """An integral that the computation depends on is infinite.

    ``certificate`` carries the exponent analysis that decided divergence.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its tolerance."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""
