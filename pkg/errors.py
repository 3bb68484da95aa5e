"""Exception hierarchy shared by the solver modules."""

from __future__ import annotations


class SinPAError(Exception):
    """Base class for every error the solver reports to its callers."""


class SourceError(SinPAError):
    """An input text problem located at a line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class LexicalError(SourceError):
    """Raised for characters that start no token."""


class GrammarError(SourceError):
    """Raised when the token stream does not match the sentence grammar."""


class UnboundIdentifierError(SourceError):
    """Raised for identifiers not bound by the quantifier prefix."""


class NonAffineDivisibilityError(SourceError):
    """Raised when div(k, t) has a sine in t or cannot be made integral."""


class MalformedRationalError(SourceError):
    """Raised for rational literals such as 3/0."""


class ArityError(SinPAError):
    """Raised when a variable index or a vector length disagrees with the arity."""


class NonOscillatoryError(SinPAError):
    """Raised when an operation needs a term with zero linear part."""


class CongruenceCapExceeded(SinPAError):
    """Raised when an equality has more sine summands than the enumeration cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"sine-equality elimination needs K={count} summands but the cap is {cap}"
        )
        self.count = count
        self.cap = cap


class NonExistentialSentence(SinPAError):
    """Raised when decide is asked about a sentence with a universal quantifier."""
