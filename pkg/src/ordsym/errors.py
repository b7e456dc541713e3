"""Exception hierarchy.

Every error raised by the library derives from :class:`OrdsymError`, which is
itself a ``ValueError`` so callers that only care about bad input can catch the
builtin.  ``run_test`` tags errors with the pipeline stage that produced them.
"""

from __future__ import annotations


class OrdsymError(ValueError):
    stage: str | None = None

    def __str__(self) -> str:
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


# patterns
class WindowTooShort(OrdsymError):
    pass


class NonFiniteValue(OrdsymError):
    pass


class SeriesTooShort(OrdsymError):
    pass


class InvalidPattern(OrdsymError):
    pass


class IdOutOfRange(OrdsymError):
    pass


# partitions
class DuplicatePattern(OrdsymError):
    pass


class NotAPartition(OrdsymError):
    pass


class BadPatternLiteral(OrdsymError):
    pass


# estimators / spectral
class TooFewWindows(OrdsymError):
    pass


class DimensionMismatch(OrdsymError):
    pass


class NotAProbabilityVector(OrdsymError):
    pass


class ZeroGroupProbability(OrdsymError):
    pass


# longrun
class UnknownKernel(OrdsymError):
    pass


class BandwidthTooSmall(OrdsymError):
    pass


# nulldist
class DegenerateModel(OrdsymError):
    pass


class NotPSD(OrdsymError):
    pass


class EmptySample(OrdsymError):
    pass


# generators
class UnstableAR(OrdsymError):
    pass


class UnknownMarginal(OrdsymError):
    pass


class BadProcessSpec(OrdsymError):
    pass


# cli / data
class UnknownExperiment(OrdsymError):
    pass


class ParseError(OrdsymError):
    def __init__(self, message: str, row: int | None = None, column: str | int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


class EmptySeries(OrdsymError):
    pass


class NonPositiveValue(OrdsymError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index
