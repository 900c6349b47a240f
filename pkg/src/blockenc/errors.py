"""Exception taxonomy.

Every failure the package raises deliberately derives from Error, so callers
can catch one type at a pipeline boundary. Validation problems (bad shapes,
bad config) and numeric premise violations share the same root; the CLI maps
the former to exit code 2 and the latter to 3 by subclass.
"""


class Error(Exception):
    """Base class for all package errors."""


class ConfigError(Error):
    """Invalid configuration, file format, or argument combination."""


class DimensionMismatch(ConfigError):
    pass


class ProfileMismatch(ConfigError):
    pass


class IndexOutOfRange(ConfigError):
    pass


class EmptyTermList(ConfigError):
    pass


class InvalidScale(ConfigError):
    pass


class NotPowerOfTwoSamples(ConfigError):
    pass


class NumericError(Error):
    """A premise on the numeric content of the inputs failed."""


class NormOverflow(NumericError):
    pass


class AmplificationOverflow(NumericError):
    pass


class NotHermitian(NumericError):
    pass


class NotNormalized(NumericError):
    pass


class NotAdmissible(NumericError):
    pass


class NotPSD(NumericError):
    pass


class SpectrumOutOfRange(NumericError):
    pass


class Singular(NumericError):
    pass


class RankDeficient(NumericError):
    pass


class ZeroMatrix(NumericError):
    pass


class ZeroVector(NumericError):
    pass


class ZeroOutcome(NumericError):
    pass


class NormPromiseViolated(NumericError):
    pass


class StepSizeOutOfRange(ConfigError):
    pass


class OverlapCollapse(NumericError):
    pass


class DegenerateGround(NumericError):
    pass


class ZeroOverlap(NumericError):
    pass


class UnboundSymbol(ConfigError):
    pass


class NonPositiveParameter(ConfigError):
    pass


class GapTooSmall(UserWarning):
    """Spectral gap below the requested working gap; results may be slow to converge."""


class DegenerateTopEigenvalue(UserWarning):
    """Top covariance eigenvalues nearly tied; descent direction is ill-defined."""


class InvalidCoefficients(UserWarning):
    """Multistep coefficient table fails the order-consistency identities."""
