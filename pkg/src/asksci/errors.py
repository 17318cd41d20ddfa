"""Error hierarchy shared across the package.

Every failure mode raised to callers derives from AskSciError so the
service layer can map errors to HTTP statuses in one place.
"""


class AskSciError(Exception):
    pass


# -- domain validation --

class EmptyField(AskSciError):
    pass


class BadSection(AskSciError):
    pass


class YearOutOfRange(AskSciError):
    pass


class EmptyText(AskSciError):
    pass


# -- embedding --

class RemoteUnavailable(AskSciError):
    """Remote embedding provider timed out or failed at transport level."""


class DimensionMismatch(AskSciError):
    pass


# -- vector index --

class DimMismatch(AskSciError):
    pass


class DuplicateId(AskSciError):
    pass


class EmptyIndex(AskSciError):
    pass


class IoFailure(AskSciError):
    pass


class ChecksumMismatch(AskSciError):
    pass


class VersionUnsupported(AskSciError):
    pass


# -- ingestion --

class SchemaViolation(AskSciError):
    """Input file violates the documented schema; message carries the element path."""


class EmptyCorpus(AskSciError):
    pass


# -- query engine --

class EmptyQuestion(AskSciError):
    pass


class IndexNotLoaded(AskSciError):
    pass


class EmbedFailure(AskSciError):
    pass


# -- feedback --

class UnknownQuestion(AskSciError):
    pass


class PositionOutOfRange(AskSciError):
    pass


class BadWindow(AskSciError):
    pass
