"""Exception types shared across the package."""

from __future__ import annotations


class PfcsError(Exception):
    """Base class for all package errors."""


class SignatureError(PfcsError):
    """Mismatched generator signatures or an invalid generator index."""


class NonNilpotentError(PfcsError):
    """Exponential requested for an element with a nonzero body."""


class BasisError(PfcsError):
    """Incompatible basis tags in a graded contraction."""


class PairingError(PfcsError):
    """A bra/ket pairing needs a Gram table that was not supplied."""


class ArgumentError(PfcsError, ValueError):
    """Invalid numeric argument (step size, horizon, rates)."""


class RegimeError(PfcsError):
    """Parameters outside the regime an operation supports."""


class ZeroCoupling(RegimeError):
    """The coupling omega vanishes."""


class StrongDamping(RegimeError):
    """|omega|^2 < delta^2: the eigenvalues are purely imaginary."""


class DegenerateOmega(RegimeError):
    """|omega|^2 == delta^2: Omega = 0 and the spectrum collapses."""


class NotDegenerate(RegimeError):
    """Degenerate-case formula requested away from Omega = 0."""
