"""Exception hierarchy shared across the package.

Every pipeline failure is a distinct class so callers (and the CLI) can
map outcomes to exit codes without string matching.
"""

from __future__ import annotations


class MatrixSOSError(Exception):
    """Base class for all package errors."""


class ParseError(MatrixSOSError):
    """Malformed expression or input file; carries a position when known."""

    def __init__(self, message, position=None, line=None):
        self.position = position
        self.line = line
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif position is not None:
            where = f" (at position {position})"
        super().__init__(message + where)


class ExactDivisionError(MatrixSOSError):
    """An exact polynomial division left a nonzero remainder."""


class DimensionMismatchError(MatrixSOSError):
    """Matrix/vector dimensions or variable sets do not agree."""


class EntriesNotPolynomialError(MatrixSOSError):
    """An operation restricted to polynomial matrices met a nontrivial denominator."""


class NotDiagonalizableError(MatrixSOSError):
    """The minimal polynomial has a repeated root, so no certificate can exist."""


class LemmaViolation(MatrixSOSError):
    """A minimal-polynomial coefficient fails a nonnegativity requirement.

    Carries the offending coefficient index and, for sampling refutations,
    the witness point and the negative value found there.
    """

    def __init__(self, message, index=None, witness=None, value=None):
        self.index = index
        self.witness = witness
        self.value = value
        super().__init__(message)


class NotSymmetricError(MatrixSOSError):
    """Certification requires a symmetric input matrix."""


class NotPSDError(MatrixSOSError):
    """Sampling found a point where some principal minor is negative."""

    def __init__(self, message, witness=None, minor_indices=None, value=None):
        self.witness = witness
        self.minor_indices = minor_indices
        self.value = value
        super().__init__(message)


class NotCoprimeError(MatrixSOSError):
    """gcd(b, p) is nonconstant, so b is not invertible modulo p."""


class MissingScalarCertError(MatrixSOSError):
    """No scalar certificate was supplied for a nonzero coefficient."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class VerificationFailedError(MatrixSOSError):
    """A certificate that should verify does not; always an internal bug."""


class SOSProviderError(MatrixSOSError):
    """Base for scalar sum-of-squares provider failures (not fatal in a chain)."""


class NotApplicableError(SOSProviderError):
    """The provider's preconditions do not hold for this input."""


class NegativeTargetError(NotApplicableError):
    """The target is a negative constant, which can never be a sum of squares."""


class NotFoundError(SOSProviderError):
    """The provider ran but found no certificate; not a proof of non-existence."""


class ZeroMultiplierError(SOSProviderError):
    """A denominator lift was attempted with a zero multiplier."""


class ScalarSOSUnavailable(MatrixSOSError):
    """Every provider in the chain failed for some target polynomial.

    ``reasons`` maps provider name to the failure message, in chain order.
    ``coefficient_index`` is set when the target is a minimal-polynomial
    coefficient of a matrix being certified.
    """

    def __init__(self, message, target=None, reasons=None, coefficient_index=None):
        self.target = target
        self.reasons = dict(reasons or {})
        self.coefficient_index = coefficient_index
        super().__init__(message)
