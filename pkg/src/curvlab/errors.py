"""Exception types shared across the package."""


class CurvlabError(Exception):
    """Base class for errors raised by this package."""


class DomainError(CurvlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConstructionError(CurvlabError, ValueError):
    """A space or surface cannot be built from the given parameters."""


class SamplingError(CurvlabError, RuntimeError):
    """A rejection sampler exhausted its retry budget."""


class HypothesisViolation(CurvlabError, RuntimeError):
    """Input data violates the hypothesis of the check being run.

    Checks that require hypotheses (convexity, star-shapedness, ambient
    conditions) raise this instead of returning a misleading number; runners
    convert it into a "skipped/violated" verdict rather than a failure.
    """
