"""Exception hierarchy shared by every stage of the audit pipeline."""


class AuditError(Exception):
    """Base class for all errors raised by p2baudit."""


# corpus
class MissingFile(AuditError):
    pass


class MalformedManifest(AuditError):
    pass


class EmptyCorpus(AuditError):
    pass


# checklist
class UnknownQuestion(AuditError, KeyError):
    pass


# providers
class ProviderError(AuditError):
    pass


class BudgetExceeded(ProviderError):
    pass


class ProviderUnavailable(ProviderError):
    pass


class ProviderRefusal(ProviderError):
    pass


class EmptyInputText(ProviderError, ValueError):
    pass


# direct strategy
class BudgetTooSmall(AuditError):
    pass


class UnparseableScore(AuditError, ValueError):
    pass


class OutOfRangeScore(AuditError, ValueError):
    pass


class AllChunksFailed(AuditError):
    pass


# retrieval / dox
class DimensionMismatch(AuditError, ValueError):
    pass


class NoParagraphs(AuditError):
    pass


class EmptyAnswerList(AuditError, ValueError):
    pass


class UnparseableVerdict(AuditError, ValueError):
    pass


class BadThreshold(AuditError, ValueError):
    pass


# evaluation
class EvenLabelCount(AuditError, ValueError):
    pass


class KeyMismatch(AuditError):
    def __init__(self, message, only_left=(), only_right=()):
        super().__init__(message)
        self.only_left = sorted(only_left)
        self.only_right = sorted(only_right)


class EmptyList(AuditError, ValueError):
    pass


class EmptySample(AuditError, ValueError):
    pass


class OutOfRangeU(AuditError, ValueError):
    pass
