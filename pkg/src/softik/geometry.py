"""Physical constants of the actuator shared by every kinematic map."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ActuatorGeometry:
    """Actuator constants.

    Fields:
        d: chamber-offset radius, mm (centerline to chamber centerline).
        l0: rest chamber length, mm.
        k: compliance parameter of the pressure-elongation law, MPa^-1.
        area_ratio: stress-area ratio A/A' (dimensionless).
        mu0: initial shear modulus, MPa. Derived as area_ratio / k when omitted;
            if given, it must satisfy k * mu0 = area_ratio to 1e-9 relative.
        p_max: maximum admissible chamber pressure, kPa.
    """

    d: float = 12.5
    l0: float = 120.0
    k: float = 2.128
    area_ratio: float = 2.547
    mu0: float | None = None
    p_max: float = 200.0

    def __post_init__(self):
        for name in ("d", "l0", "k", "area_ratio", "p_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if self.mu0 is None:
            object.__setattr__(self, "mu0", self.area_ratio / self.k)
        else:
            if not (math.isfinite(self.mu0) and self.mu0 > 0):
                raise ValueError(f"mu0 must be positive and finite, got {self.mu0!r}")
            if abs(self.k * self.mu0 - self.area_ratio) > 1e-9 * abs(self.area_ratio):
                raise ValueError(
                    f"inconsistent material constants: k*mu0 = {self.k * self.mu0!r} "
                    f"but area_ratio = {self.area_ratio!r}"
                )

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "l0": self.l0,
            "k": self.k,
            "area_ratio": self.area_ratio,
            "mu0": self.mu0,
            "p_max": self.p_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ActuatorGeometry":
        return cls(**d)


DEFAULT_GEOMETRY = ActuatorGeometry()
