from typing import Optional


class FourierCondError(Exception):
    """Base class for every error raised by the package"""


class NodeSetError(FourierCondError, ValueError):
    """Malformed, non-finite or degenerate node input"""


class ClumpValidationError(NodeSetError):
    """A proposed clump partition breaks one of the clump axioms"""

    def __init__(self, axiom: str, message: str):
        super().__init__(f"{axiom}: {message}")
        self.axiom = axiom


class InapplicableHypothesisError(FourierCondError):
    """A theorem or construction hypothesis does not hold for the given input"""

    def __init__(self, hypothesis: str, message: Optional[str] = None):
        super().__init__(f"{hypothesis}: {message}" if message else hypothesis)
        self.hypothesis = hypothesis


class NoAdmissibleTauError(InapplicableHypothesisError):
    """No candidate tau passes the density criterion"""


class BoundInvariantError(FourierCondError, AssertionError):
    """An internal invariant guaranteed by the constructions failed"""


class BoundViolationError(FourierCondError):
    """A certified lower bound exceeded the oracle value"""
