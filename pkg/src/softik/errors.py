"""Exception types shared across the package."""


class SoftikError(Exception):
    """Base class for all domain errors raised by this package."""


class NonPositiveZ(SoftikError):
    """Tip position with z <= 0 is outside the model domain."""


class NonPositiveLength(SoftikError):
    """A chamber length came out <= 0 (curvature too extreme for the geometry)."""


class InfiniteRadius(SoftikError):
    """Equal chamber lengths: straight configuration, bending radius undefined."""


class DegenerateGeometry(SoftikError):
    """Geometry parameter (e.g. chamber offset d) is not usable."""


class BracketFailure(SoftikError):
    """Root-finding target lies outside the bisection bracket (nonphysical input)."""


class Unreachable(SoftikError):
    """A target tip position requires a chamber pressure outside [0, p_max].

    Attributes:
        chamber: 1-based index of the first offending chamber.
        p_required: the pressure (kPa) that chamber would need.
        waypoint: optional waypoint index, attached by trajectory planning.
    """

    def __init__(self, chamber: int, p_required: float, waypoint=None):
        self.chamber = chamber
        self.p_required = p_required
        self.waypoint = waypoint
        loc = f" at waypoint {waypoint}" if waypoint is not None else ""
        super().__init__(
            f"chamber {chamber} requires {p_required:.3f} kPa{loc}, outside [0, p_max]"
        )


class InsufficientData(SoftikError):
    """Too few calibration samples."""


class DegenerateFit(SoftikError):
    """Calibration samples do not span distinct pressures."""


class DegenerateFeature(SoftikError):
    """A feature has zero variance and cannot be standardized."""


class DivergedLoss(SoftikError):
    """Training MSE became non-finite (learning rate too large)."""


class NoEligibleComponents(SoftikError):
    """All target components fall below the MAPE eligibility threshold."""


class ConstantTargets(SoftikError):
    """R^2 is undefined: targets have zero total variance."""


class UnknownLevel(SoftikError):
    """A requested split level is not one of the dataset's grid levels."""


class ConfigError(SoftikError):
    """Run configuration failed validation; message names the offending field."""
