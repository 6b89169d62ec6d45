"""Exception hierarchy; every error the package raises derives from StratError."""


class StratError(Exception):
    """Base class."""


class ValidationError(StratError, ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotProportionable(ValidationError):
    pass


class ZeroStratum(ValidationError):
    pass


class NotProportional(ValidationError):
    pass


class HypothesisViolated(ValidationError):
    pass


class ExhaustedStratum(ValidationError):
    pass


class EmptyClass(StratError):
    pass


class SearchSpaceExceeded(StratError):
    def __init__(self, count, cap):
        super().__init__(f"search space of {count} items exceeds cap {cap}")
        self.count = count
        self.cap = cap


class UnknownTheoremId(StratError, KeyError):
    def __str__(self):
        return f"unknown theorem id {self.args[0]!r}"
