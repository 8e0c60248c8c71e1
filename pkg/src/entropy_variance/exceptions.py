"""Exception hierarchy.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch one thing.
"""


class EntropyVarianceError(ValueError):
    pass


class NegativeEntry(EntropyVarianceError):
    pass


class SumNotOne(EntropyVarianceError):
    pass


class AllZero(EntropyVarianceError):
    pass


class ParseError(EntropyVarianceError):
    """Raised when an input file cannot be parsed.

    ``line`` is 1-based, or ``None`` when the failure is not tied to a line
    (malformed JSON, empty file).
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ZeroProbability(EntropyVarianceError):
    pass


class SupportTooSmall(EntropyVarianceError):
    pass


class DomainError(EntropyVarianceError):
    pass


class IndexOutOfRange(EntropyVarianceError, IndexError):
    pass


class DegenerateInput(EntropyVarianceError):
    pass


class ResourceBudgetExceeded(EntropyVarianceError):
    pass
