"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): input that is
malformed or physically invalid (``ValidationError``, exit 1) and requests
that exceed a size cap (``ResourceError``, exit 2).
"""


class CatSamplerError(Exception):
    """Base class for all package errors."""


class ValidationError(CatSamplerError, ValueError):
    pass


class ResourceError(CatSamplerError):
    pass


class NonSquare(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class NotUnitary(ValidationError):
    def __init__(self, deviation, tol):
        super().__init__(
            f"matrix is not unitary: max |U U^dag - I| = {deviation:.3e} > tol {tol:.1e}"
        )
        self.deviation = deviation
        self.tol = tol


class DimMismatch(ValidationError):
    pass


class ModeOutOfRange(ValidationError):
    pass


class EmptyCat(ValidationError):
    pass


class DegenerateNorm(ValidationError):
    pass


class EmptyDistribution(ValidationError):
    pass


class TooLarge(ResourceError):
    pass


class NOverflow(ResourceError):
    pass


class TermExplosion(ResourceError):
    pass
