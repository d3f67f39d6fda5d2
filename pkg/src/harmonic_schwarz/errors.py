"""Exception types shared across the package."""


class QuadratureError(ValueError):
    """A rule could not be built or an integrand misbehaved at a node."""


class SolverError(RuntimeError):
    """The moment solver did not reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class OracleError(RuntimeError):
    """The discretized verification program failed to certify a value."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap
