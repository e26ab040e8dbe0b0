"""Exception types raised across supvkit."""


class SupvkitError(Exception):
    """Base class for all toolkit errors."""


class ConflictingAttributes(SupvkitError):
    """A shared event label carries different controllability attributes."""


class AlphabetMismatch(SupvkitError):
    """Operands of an operation requiring identical alphabets differ."""


class BudgetExceeded(SupvkitError):
    """An enumeration or search would exceed its configured budget."""


class NotSubbehavior(SupvkitError):
    """A supervisor's closed behaviour is not contained in the plant's."""


class ContainmentViolated(SupvkitError):
    """The chain K <= C <= Lm(G) required for relative observability fails."""


class NonCongruenceCover(SupvkitError):
    """A cover with overlapping cells was passed where a congruence is required."""


class ParseError(SupvkitError):
    """A document could not be parsed."""


class ValidationError(SupvkitError):
    """A parsed document breaks a structural invariant."""
