"""Exception types shared across the package."""


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class PoleError(ZeroDivisionError):
    """A denominator vanishes (identically, or at an evaluation point)."""


class SingularMetricError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class InconsistentSystemError(ValueError):
    pass


class NotIntegrableError(ValueError):
    def __init__(self, verdict):
        self.verdict = verdict
        super().__init__(f"metric is not locally conformally flat: {verdict.describe()}")


class QuadricError(RuntimeError):
    """Raised when the space of quadratic relations is not one-dimensional."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        if dimension == 0:
            msg = "no quadratic relation among the solutions"
        else:
            msg = f"{dimension}-dimensional space of quadratic relations; raise the truncation order"
        super().__init__(msg)


class DomainError(PoleError):
    """A point lies on a declared excluded locus."""


class DegeneratePullbackWarning(UserWarning):
    pass
