"""Exception hierarchy and process exit codes.

Exit code contract: 1 for configuration problems, 2 for physics
validation failures, 3 for numerical failures (singularities,
ill-conditioning).
"""

EXIT_CONFIG = 1
EXIT_PHYSICS = 2
EXIT_NUMERICAL = 3


class OmnisurfError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = EXIT_CONFIG


class ConfigError(OmnisurfError):
    """Malformed scenario, unknown option, or inconsistent CLI flags."""

    exit_code = EXIT_CONFIG


class PhysicsError(OmnisurfError):
    """A physical invariant or model precondition is violated."""

    exit_code = EXIT_PHYSICS


class PassivityError(PhysicsError):
    """Element response would emit more power than it receives."""


class AlignmentError(PhysicsError):
    """Sampling grid does not line up with the element grid."""


class CoverageError(PhysicsError):
    """An element footprint contains no susceptibility samples."""


class AliasingError(PhysicsError):
    """Aperture sampling too coarse for the requested operation."""


class SideError(PhysicsError):
    """Source or receiver placed in the wrong half-space."""


class NumericalError(OmnisurfError):
    """Runtime numerical failure: singular geometry or system."""

    exit_code = EXIT_NUMERICAL


class SingularSheetError(NumericalError):
    """Sheet parameters hit a pole of the coefficient map."""


class SingularDistanceError(NumericalError):
    """Evaluation point coincides with a radiating element."""


class SingularNetworkError(NumericalError):
    """Port network system is singular or hopelessly ill-conditioned."""
