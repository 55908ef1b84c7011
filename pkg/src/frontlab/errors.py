"""Exception types shared across the toolbox."""


class FrontlabError(ValueError):
    """Base class for domain errors (bad parameters, violated preconditions)."""


class DistinctnessError(FrontlabError):
    """Nodes or time scales are too close for a structured solve."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class BranchCutError(FrontlabError):
    """Evaluation point too close to a branch cut of the Evans function."""


class DesignError(FrontlabError):
    """A parameter-design request is outside the provable range."""


class ConvergenceError(FrontlabError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message, best=None, diagnostics=None):
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics or {}
