"""Exception hierarchy.

Every error raised on bad input derives from :class:`HyperSearchError`, so
callers (and the CLI) can separate precondition failures from bugs.
"""


class HyperSearchError(ValueError):
    """Base class for all input/precondition errors."""


class EmptyEdge(HyperSearchError):
    pass


class NodeOutOfRange(HyperSearchError):
    pass


class ParseError(HyperSearchError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class InconsistentCounts(HyperSearchError):
    pass


class EmptyResult(HyperSearchError):
    pass


class MissingTimestamps(HyperSearchError):
    pass


class MissingFeatures(HyperSearchError):
    pass


class SizeTooSmall(HyperSearchError):
    pass


class EmptyTestSet(HyperSearchError):
    pass


class EmptyInput(HyperSearchError):
    pass


class DegenerateDegrees(HyperSearchError):
    pass

