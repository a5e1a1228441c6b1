"""Exception hierarchy shared across the package."""


class CaterpillarError(Exception):
    """Base class for all domain errors raised by qcaterpillar."""


class InvalidShape(CaterpillarError, ValueError):
    pass


class InvalidTree(CaterpillarError, ValueError):
    pass


class NotCaterpillar(CaterpillarError):
    pass


class RootNotStalkEnd(CaterpillarError):
    pass


class DivisionByZeroPoly(CaterpillarError, ZeroDivisionError):
    pass


class DimensionMismatch(CaterpillarError, ValueError):
    pass


class NotDivisible(CaterpillarError):
    pass


class RootDegreeNotOne(CaterpillarError):
    pass


class NotCaterpillarForm(CaterpillarError):
    """The ratio does not expand into the caterpillar chain form."""


class ToleranceExceeded(CaterpillarError):
    """A rounded quantity fell outside its tolerance band."""


class InconsistentWindows(CaterpillarError):
    pass


class MirrorMismatch(CaterpillarError):
    pass


class CountMismatch(CaterpillarError):
    pass


class UnexpectedLineCluster(CaterpillarError):
    pass


class VerificationFailed(CaterpillarError):
    """Recovered shape does not reproduce the measured data."""
