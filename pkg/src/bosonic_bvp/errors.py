"""Exception hierarchy shared by all modules."""


class BosonicError(Exception):
    """Base class for library errors."""


class DimensionMismatch(BosonicError, ValueError):
    pass


class DomainError(BosonicError, ValueError):
    """A point or parameter lies outside the domain of an operation."""


class PoleError(DomainError):
    """A Möbius-type map was evaluated at (or too near) its pole."""


class GuardError(DomainError):
    """An evaluation point violates a singularity or margin guard."""


class BudgetError(BosonicError):
    """A construction would exceed the configured size budget."""


class QuadratureError(BosonicError):
    """Raised when a quadrature sum cannot be trusted (non-finite samples, divergent tails)."""


class DecayError(QuadratureError):
    """Boundary data does not decay as declared on the outer quadrature nodes."""


class NotInHkError(BosonicError, ValueError):
    """A polynomial that should lie in H_k does not (residual reported in the message)."""
