"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class ConstructionError(RuntimeError):
    """A randomized construction failed within its retry budget."""


class BudgetError(RuntimeError):
    """An exhaustive computation would exceed its configured budget."""


class CompositionError(ValueError):
    """Incompatible systems passed to a circuit composition product."""


class FeedbackLoopError(CompositionError):
    """Ill-posed feedback connection: the loop operator 1 - S_kl is singular."""
