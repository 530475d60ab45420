"""Exception types shared across the package."""


class RealLineError(Exception):
    """Base class for all package errors."""


class Unnormalizable(RealLineError):
    """The engine cannot certify disjointness/equivalence for the input.

    Raised instead of guessing; signals unsupported input, never a wrong
    answer.
    """


class ParseError(RealLineError):
    """Syntax error in the set-expression DSL, tagged with a position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InvalidCut(RealLineError):
    """A clopen split was requested at a point in the closure of the set."""


class NotApplicable(RealLineError):
    """A witness of the requested kind does not exist for this input."""


class NotGcc(RealLineError):
    """A surjection plan was requested for a set that fails the decider."""


class NotMember(RealLineError):
    """A preimage was requested for a value outside the set."""


class DomainError(RealLineError):
    """Evaluation at a point outside the declared domain."""


class NotCompact(RealLineError):
    """A Cantor-stage bracket was requested for a non-compact set."""


class UnsupportedConfig(RealLineError):
    """A fixture configuration whose verdict trace would be unsound."""

    def __init__(self, message: str, detail=None):
        super().__init__(message)
        self.detail = detail
