"""Exception types shared across the package."""


class QcorrError(Exception):
    """Base class for all qcorr errors."""


class InvalidInput(QcorrError):
    """Input violates a structural precondition (shape, finiteness, domain)."""


class NotNormalized(QcorrError):
    """A state or distribution fails its normalization requirement."""


class NotPsd(QcorrError):
    """A matrix required to be positive semi-definite is not."""


class FactorizationMismatch(QcorrError):
    """A factorization does not reproduce its target within tolerance."""


class ParseError(QcorrError):
    """A file could not be parsed; the message carries line/field context."""
