"""Exception types shared across the package.

DataError subclasses signal malformed inputs or broken contracts (CLI exit 3).
GuardError subclasses signal refused-but-valid requests, e.g. search spaces too
large to enumerate (CLI exit 4).
"""

from __future__ import annotations


class KeythreadError(Exception):
    pass


class DataError(KeythreadError):
    pass


class GuardError(KeythreadError):
    pass


class MalformedHeader(DataError):
    pass


class TruncatedPayload(DataError):
    pass


class DimZero(DataError):
    pass


class ZeroRow(DataError):
    def __init__(self, row: int):
        super().__init__(f"row {row} has zero norm")
        self.row = row


class DuplicateIndex(DataError):
    def __init__(self, index: int):
        super().__init__(f"duplicate index {index}")
        self.index = index


class MalformedLine(DataError):
    def __init__(self, lineno: int, reason: str = ""):
        msg = f"malformed line {lineno}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.lineno = lineno


class NegativeIndex(DataError):
    pass


class DimMismatch(DataError):
    pass


class NotNormalized(DataError):
    pass


class SameIndex(DataError):
    pass


class NegativeAlpha(DataError):
    pass


class KOutOfRange(DataError):
    pass


class IndexOutOfRange(DataError):
    pass


class RankOutOfRange(DataError):
    pass


class ResolutionTooSmall(DataError):
    pass


class EmptyKeyframes(DataError):
    pass


class MissingCaption(DataError):
    def __init__(self, t: int):
        super().__init__(f"no caption for frame {t}")
        self.t = t


class BadTemplate(DataError):
    pass


class KernelNotPSD(DataError):
    pass


class OverlappingSegments(DataError):
    pass


class SegmentOutOfRange(DataError):
    pass


class SearchSpaceTooLarge(GuardError):
    pass


class FrameCountExceedsCap(GuardError):
    pass
