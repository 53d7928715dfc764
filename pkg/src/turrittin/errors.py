"""Exception hierarchy. Every error carries a stable machine-readable tag."""


class TurrittinError(Exception):
    """Base class for all package errors."""

    tag = "error"

    def __init__(self, message="", **info):
        super().__init__(message or self.tag)
        self.info = info


class FieldError(TurrittinError):
    tag = "field-error"


class DivisionByZeroError(FieldError):
    tag = "division-by-zero"


class IncompatibleDescriptorsError(FieldError):
    tag = "incompatible-descriptors"


class SignOfComplexError(FieldError):
    tag = "sign-of-complex"


class InvalidFieldDescriptorError(FieldError):
    tag = "invalid-field-descriptor"


class UnsupportedTowerError(TurrittinError):
    tag = "unsupported-tower"


class DegreeCapExceededError(UnsupportedTowerError):
    tag = "degree-cap-exceeded"


class PrecisionError(TurrittinError):
    """Raised when a computation would need coefficients beyond a jet's guarantee.

    ``info`` may carry ``required`` (the relative truncation order that
    would make the operation succeed) and ``available``.
    """

    tag = "insufficient-precision"


class ZeroJetError(TurrittinError):
    tag = "zero-jet"


class ZeroSystemError(TurrittinError):
    tag = "zero-system"


class SingularGaugeError(TurrittinError):
    tag = "singular-P"


class LinalgError(TurrittinError):
    tag = "linalg-error"


class NotCoprimeError(LinalgError):
    tag = "not-coprime"


class DegreeMismatchError(LinalgError):
    tag = "degree-mismatch"


class SpectrumMismatchError(LinalgError):
    tag = "spectrum-mismatch"


class SpectraNotDisjointError(LinalgError):
    tag = "spectra-not-disjoint"


class CommonEigenvalueError(LinalgError):
    tag = "common-eigenvalue"


class BZeroError(LinalgError):
    tag = "b-zero"


class NotAComplexMatrixError(LinalgError):
    tag = "not-a-C-matrix"


class WrongSpectrumError(LinalgError):
    tag = "wrong-spectrum"


class ResonantResidualError(TurrittinError):
    tag = "resonant-residual"


class ParseError(TurrittinError):
    tag = "parse-error"

    def __init__(self, message="", line=None, column=None, **info):
        super().__init__(message, line=line, column=column, **info)
        self.line = line
        self.column = column
