"""Exception types shared across the package."""


class AlgebraMismatch(ValueError):
    """Operands belong to different algebras."""


class DimensionMismatch(ValueError):
    """Coordinate or operator dimensions are incompatible."""


class SingularElement(ArithmeticError):
    """Inversion was requested for an element with a (near-)zero eigenvalue."""


class NotInCone(ArithmeticError):
    """A cone-only operation was applied outside the open symmetric cone."""


class PoleError(ValueError):
    """The multivariate gamma function was evaluated at or beyond a pole."""


class OutOfRegion(ValueError):
    """A Laplace-transform argument left the convergence region."""


class JacobiConvergenceError(RuntimeError):
    """The Jacobi eigensolver failed to reach its off-diagonal tolerance."""
