"""Exception hierarchy. Every error carries a stable machine-readable category
(the class name) used by the CLI for stderr reporting."""


class InsbankError(Exception):
    @property
    def category(self) -> str:
        return type(self).__name__


class DimensionMismatch(InsbankError):
    pass


class DuplicateId(InsbankError):
    pass


class NonFiniteValue(InsbankError):
    pass


class EmptyPool(InsbankError):
    pass


class ZeroVector(InsbankError):
    pass


class DegeneratePercentiles(InsbankError):
    pass


class BudgetExceedsBank(InsbankError):
    pass


class BudgetExceedsPool(InsbankError):
    pass


class IndexOutOfRange(InsbankError):
    pass


class ConfigError(InsbankError):
    pass


class ParseError(InsbankError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ChecksumMismatch(InsbankError):
    pass


class VersionUnsupported(InsbankError):
    pass


class CorruptHeader(InsbankError):
    pass


class BankLocked(InsbankError):
    pass
