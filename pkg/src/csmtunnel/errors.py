"""Exception and warning types shared across the package."""


class CSMError(Exception):
    """Base class for all package errors."""


class GapError(CSMError):
    pass


class DegenerateSegment(CSMError):
    pass


class FilletTooLarge(CSMError):
    pass


class SingularMatrix(CSMError):
    pass


class NormalizationPointOutside(CSMError):
    pass


class EvalAtCharge(CSMError):
    pass


class EvalAtSingularity(CSMError):
    pass


class PoleHit(CSMError):
    pass


class OrientationError(CSMError):
    pass


class RangeOutsideDomain(CSMError):
    pass


class UpperHalfPlane(CSMError):
    pass


class K0Mismatch(CSMError):
    pass


class JumpVerificationFailed(CSMError):
    pass


class NonConvergence(CSMError):
    pass


class IllConditionedLS(CSMError):
    pass


class OutsideDomain(CSMError):
    pass


class NotConverged(CSMError):
    pass


class ParseError(CSMError):
    pass


class AliasWarning(UserWarning):
    """Requested Fourier mode is beyond the Nyquist limit of the sample grid."""
