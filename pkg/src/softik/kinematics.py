"""Constant-curvature geometry of the three-chamber actuator.

Bidirectional maps between the three coordinate frames of the inverse-kinematics
chain: Cartesian tip position, arc parameters (l, theta, phi), and per-chamber
axial lengths. The backbone is modeled as a circular arc of length l bent by
theta in the vertical plane at azimuth phi; chamber i sits at radius d and
azimuth alpha_i, so bending shortens or stretches it by theta*d*cos(alpha_i-phi).

All functions are pure and all value types immutable, safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGeometry, InfiniteRadius, NonPositiveLength, NonPositiveZ
from .geometry import ActuatorGeometry

# Below this bending angle the configuration is treated as straight: the
# sinc-type limits of the closed forms are removable there.
STRAIGHT_EPS = 1e-9

# Chamber azimuths. Chamber 1 points along +y; 2 and 3 complete the 120 deg fan.
CHAMBER_AZIMUTHS = (math.pi / 2, 7 * math.pi / 6, 11 * math.pi / 6)

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class TipPosition:
    """Cartesian tip coordinates in mm; actuator base at the origin, rest axis +z."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"tip coordinate {name} must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class ArcParameters:
    """Arc length l (mm), bending angle theta (rad), azimuth phi (rad).

    theta lies in [0, pi); phi in (-pi, pi], with phi = 0 by convention for the
    straight configuration.
    """

    l: float
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.l) and self.l > 0):
            raise ValueError(f"arc length must be positive, got {self.l!r}")
        if not (0.0 <= self.theta < math.pi):
            raise ValueError(f"theta must lie in [0, pi), got {self.theta!r}")
        if not (-math.pi < self.phi <= math.pi):
            raise ValueError(f"phi must lie in (-pi, pi], got {self.phi!r}")
        if self.theta == 0.0 and self.phi != 0.0:
            raise ValueError("phi must be 0 when theta is 0")


@dataclass(frozen=True)
class ChamberLengths:
    """Axial lengths of the three chambers, mm."""

    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        for name in ("l1", "l2", "l3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"chamber length {name} must be positive, got {v!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.l1, self.l2, self.l3)


def arc_to_tip(arc: ArcParameters) -> TipPosition:
    """Map arc parameters to the Cartesian tip position.

    x = (l/theta)(1 - cos theta) cos phi, y likewise with sin phi,
    z = (l/theta) sin theta. Below STRAIGHT_EPS the limit (0, 0, l) is used.
    1 - cos theta is evaluated as 2 sin^2(theta/2), which keeps full precision
    for small bends where the direct difference underflows.
    """
    if arc.theta < STRAIGHT_EPS:
        return TipPosition(0.0, 0.0, arc.l)
    r = arc.l / arc.theta
    half = math.sin(0.5 * arc.theta)
    planar = r * 2.0 * half * half
    return TipPosition(
        planar * math.cos(arc.phi),
        planar * math.sin(arc.phi),
        r * math.sin(arc.theta),
    )


def tip_to_arc(tip: TipPosition) -> ArcParameters:
    """Recover arc parameters from a tip position on the constant-curvature surface.

    phi comes from the quadrant-correct two-argument arctangent of (y, x). theta
    uses whichever of the two planar projections is better conditioned: the
    x/cos(phi) form when |x| >= |y|, the y/sin(phi) form otherwise. Each is the
    half-angle rewrite of the corresponding arccos expression, exact for tips
    produced by arc_to_tip and stable all the way to theta -> 0, where the
    arccos form loses half its digits. l = z*theta/sin(theta).

    Raises NonPositiveZ for z <= 0 (outside the model domain).
    """
    if tip.z <= 0.0:
        raise NonPositiveZ(f"tip z must be positive, got {tip.z!r}")
    phi = math.atan2(tip.y, tip.x)
    # tan(theta/2) = (planar offset)/(z) along the bending plane
    if abs(tip.x) >= abs(tip.y):
        theta = 2.0 * math.atan2(abs(tip.x), tip.z * abs(math.cos(phi)))
    else:
        theta = 2.0 * math.atan2(abs(tip.y), tip.z * abs(math.sin(phi)))
    if theta < STRAIGHT_EPS:
        return ArcParameters(tip.z, 0.0, 0.0)
    return ArcParameters(tip.z * theta / math.sin(theta), theta, phi)


def arc_to_chamber_lengths(arc: ArcParameters, geo: ActuatorGeometry) -> ChamberLengths:
    """Distribute an arc over the three chambers: l_i = l - theta*d*cos(alpha_i - phi).

    The azimuths are 120 degrees apart, so l1 + l2 + l3 = 3l identically.
    Raises NonPositiveLength when the curvature is too extreme for the geometry.
    """
    ls = [arc.l - arc.theta * geo.d * math.cos(a - arc.phi) for a in CHAMBER_AZIMUTHS]
    for i, li in enumerate(ls, start=1):
        if li <= 0.0:
            raise NonPositiveLength(f"chamber {i} length {li!r} <= 0")
    return ChamberLengths(*ls)


def _pairwise_radicand(l1: float, l2: float, l3: float) -> float:
    # Algebraically l1^2+l2^2+l3^2 - l1l2 - l1l3 - l2l3, but written over the
    # pairwise differences: the expanded form cancels catastrophically for
    # near-equal lengths and this one does not.
    return 0.5 * ((l1 - l2) ** 2 + (l1 - l3) ** 2 + (l2 - l3) ** 2)


def bending_radius(lengths: ChamberLengths, geo: ActuatorGeometry) -> float:
    """Bending radius R = d*(l1+l2+l3) / (2*sqrt(radicand)) in mm.

    For lengths generated from an arc, R*theta = l. Raises InfiniteRadius for
    equal lengths (straight configuration, zero curvature).
    """
    if geo.d <= 0.0:
        raise DegenerateGeometry(f"chamber offset d must be positive, got {geo.d!r}")
    l1, l2, l3 = lengths.as_tuple()
    rad = _pairwise_radicand(l1, l2, l3)
    if rad == 0.0:
        raise InfiniteRadius("equal chamber lengths: straight configuration")
    return geo.d * (l1 + l2 + l3) / (2.0 * math.sqrt(rad))


def chamber_lengths_to_arc(lengths: ChamberLengths, geo: ActuatorGeometry) -> ArcParameters:
    """Invert arc_to_chamber_lengths.

    l is the mean length; theta = l/R reduces to 2*sqrt(radicand)/(3d); phi is
    recovered from the two independent linear combinations
    l - l1 = theta*d*sin(phi) and (l2 - l3)/sqrt(3) = theta*d*cos(phi).
    Equal lengths return the straight arc (theta = 0, phi = 0).
    """
    if geo.d <= 0.0:
        raise DegenerateGeometry(f"chamber offset d must be positive, got {geo.d!r}")
    l1, l2, l3 = lengths.as_tuple()
    l = (l1 + l2 + l3) / 3.0
    rad = _pairwise_radicand(l1, l2, l3)
    if rad == 0.0:
        return ArcParameters(l, 0.0, 0.0)
    theta = 2.0 * math.sqrt(rad) / (3.0 * geo.d)
    phi = math.atan2(l - l1, (l2 - l3) / _SQRT3)
    return ArcParameters(l, theta, phi)
