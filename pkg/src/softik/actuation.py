"""Pressure-elongation material map, its calibration, and the analytical IK chain.

A chamber at axial length li under gauge pressure P obeys the hyperelastic law

    k * P = li/l0 - (l0/li)^3        (P in MPa)

with compliance k = area_ratio / mu0. The left side is strictly increasing in li,
so the inverse is a clean bisection target. Composing the material map with the
constant-curvature geometry gives the full analytical inverse-kinematics model
(tip -> pressures) and its forward counterpart (pressures -> tip).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BracketFailure,
    DegenerateFit,
    InsufficientData,
    Unreachable,
)
from .geometry import ActuatorGeometry
from .kinematics import (
    ChamberLengths,
    TipPosition,
    arc_to_chamber_lengths,
    arc_to_tip,
    chamber_lengths_to_arc,
    tip_to_arc,
)

_BISECTION_MAX_ITERS = 200


@dataclass(frozen=True)
class ChamberPressures:
    """Gauge pressures of the three chambers, kPa.

    Any finite value is permitted here; admissibility against [0, p_max] is
    checked by the operations that consume pressures.
    """

    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        for name in ("p1", "p2", "p3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"pressure {name} must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p3)


@dataclass(frozen=True)
class CalibrationFit:
    """Result of fitting the compliance parameter from equal-pressurization data.

    k_hat in MPa^-1, mu0_hat = area_ratio / k_hat in MPa, residual is the RMS
    pressure-domain fit residual in MPa.
    """

    k_hat: float
    mu0_hat: float
    residual: float


def _elongation(li: float, l0: float) -> float:
    r = li / l0
    return r - 1.0 / (r * r * r)


def length_to_pressure(li: float, geo: ActuatorGeometry) -> float:
    """Pressure (kPa) that holds a chamber at length li (mm). P(l0) = 0."""
    if li <= 0.0:
        raise ValueError(f"chamber length must be positive, got {li!r}")
    return _elongation(li, geo.l0) / geo.k * 1000.0


def pressure_to_length(p: float, geo: ActuatorGeometry, p_min_solvable: float = 0.0) -> float:
    """Chamber length (mm) at pressure p (kPa): numerical inverse of the material law.

    Bisects the strictly monotone g(l) = l/l0 - (l0/l)^3 - k*P on [0.5*l0, 3*l0].
    The loop runs until the midpoint collides with a bracket endpoint, i.e. to
    float exhaustion; stopping at a fixed 1e-12 relative tolerance would leave
    round-trip errors near 2e-9 kPa at the top of the pressure range.

    Raises BracketFailure when k*P falls outside g's range on the bracket or the
    pressure is below p_min_solvable.
    """
    if p < p_min_solvable:
        raise BracketFailure(
            f"pressure {p!r} kPa below the solvable minimum {p_min_solvable!r}"
        )
    target = geo.k * p / 1000.0
    lo, hi = 0.5 * geo.l0, 3.0 * geo.l0
    if not (_elongation(lo, geo.l0) <= target <= _elongation(hi, geo.l0)):
        raise BracketFailure(
            f"k*P = {target!r} outside the elongation range on [{lo}, {hi}] mm"
        )
    for _ in range(_BISECTION_MAX_ITERS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _elongation(mid, geo.l0) > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def calibrate(
    samples: Sequence[tuple[float, float]], geo: ActuatorGeometry
) -> CalibrationFit:
    """Fit the compliance parameter from (pressure kPa, length mm) samples.

    Equal-pressurization protocol: all three chambers at the same pressure, so
    each sample is one chamber length measurement. The law k*P = y with
    y = l/l0 - (l0/l)^3 is linear in k, so k_hat is the least-squares slope of y
    on P through the origin (pressures in MPa). mu0_hat follows from
    area_ratio = k * mu0.

    Raises InsufficientData for fewer than 3 samples and DegenerateFit when the
    samples do not span distinct pressures.
    """
    if len(samples) < 3:
        raise InsufficientData(f"need >= 3 calibration samples, got {len(samples)}")
    p_mpa = [p / 1000.0 for p, _ in samples]
    if len(set(p_mpa)) < 2:
        raise DegenerateFit("calibration samples must span distinct pressures")
    ys = [_elongation(li, geo.l0) for _, li in samples]
    denom = sum(p * p for p in p_mpa)
    if denom == 0.0:
        raise DegenerateFit("all calibration pressures are zero")
    k_hat = sum(p * y for p, y in zip(p_mpa, ys)) / denom
    if k_hat <= 0.0:
        raise DegenerateFit(f"fitted compliance is not positive: {k_hat!r}")
    resid = [y / k_hat - p for p, y in zip(p_mpa, ys)]
    rms = math.sqrt(sum(r * r for r in resid) / len(resid))
    return CalibrationFit(k_hat=k_hat, mu0_hat=geo.area_ratio / k_hat, residual=rms)


def load_calibration_csv(path) -> list[tuple[float, float]]:
    """Read calibration samples from a CSV with header `P_kPa,length_mm`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["P_kPa", "length_mm"]:
            raise ValueError(
                f"expected calibration header ['P_kPa', 'length_mm'], got {header!r}"
            )
        return [(float(row[0]), float(row[1])) for row in reader if row]


def analytical_ik(tip: TipPosition, geo: ActuatorGeometry) -> ChamberPressures:
    """Closed-form inverse kinematics: tip position -> chamber pressures.

    Composes tip_to_arc, arc_to_chamber_lengths, and the material map per
    chamber. Raises Unreachable (with the first offending chamber and its
    required pressure) when any chamber would need a pressure outside
    [0, p_max]; negative demands are unreachable rather than clamped because
    the platform has no vacuum supply.
    """
    arc = tip_to_arc(tip)
    lengths = arc_to_chamber_lengths(arc, geo)
    ps = [length_to_pressure(li, geo) for li in lengths.as_tuple()]
    for i, p in enumerate(ps, start=1):
        if p < 0.0 or p > geo.p_max:
            raise Unreachable(chamber=i, p_required=p)
    return ChamberPressures(*ps)


def forward_model(p: ChamberPressures, geo: ActuatorGeometry) -> TipPosition:
    """Forward map: admissible chamber pressures -> tip position.

    The model-consistency oracle for every learning experiment:
    analytical_ik(forward_model(p)) = p for interior states.
    """
    for i, pi in enumerate(p.as_tuple(), start=1):
        if pi < 0.0 or pi > geo.p_max:
            raise ValueError(
                f"chamber {i} pressure {pi!r} kPa outside [0, {geo.p_max}]"
            )
    lengths = ChamberLengths(*(pressure_to_length(pi, geo) for pi in p.as_tuple()))
    return arc_to_tip(chamber_lengths_to_arc(lengths, geo))
