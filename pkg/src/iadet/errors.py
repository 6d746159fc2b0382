"""Exception types shared across the package."""


class IadetError(Exception):
    """Base class for all iadet errors."""


class NoPositivesError(IadetError):
    """Average precision is undefined: the evaluation set has no ground truth."""


class UndefinedRatioError(IadetError):
    """A ratio against a zero reference value was requested."""


class UnknownImageError(IadetError):
    """The store has no record with the given image id."""


class AnnotationCompleteError(IadetError):
    """The unlabeled pool is empty; there is nothing left to select."""


class MissingGroundTruthError(IadetError):
    """A simulation-only operation needs gt boxes that are not present."""


class StaleVersionError(IadetError):
    """A model version at or below the current one was offered for publication."""
