"""Exception hierarchy.

Model errors are ``ValueError`` subclasses so callers that only care about
bad input can catch the builtin. Numerical failures derive from
:class:`NumericalError`.
"""


class ModelError(ValueError):
    """Structurally invalid MDP, policy, family or distribution."""


class NumericalError(ArithmeticError):
    """Base class for failures of the numerical routines."""


class SingularSystem(NumericalError):
    """The stationary linear system is singular (chain not irreducible?)."""


class NonPositiveResult(NumericalError):
    """A computed distribution has an entry that is not strictly positive."""


class NoConvergence(NumericalError):
    """An iterative solver hit its iteration cap."""


class DegenerateDenominator(NumericalError):
    """The normalizing sum of the weight vector is (relatively) zero."""


class EmptyNumerator(DegenerateDenominator):
    """Every restricted permutation set is empty, so all weights vanish."""
