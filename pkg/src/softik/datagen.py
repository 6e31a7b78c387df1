"""Synthetic measurement platform: pressure grid, simulated tips, split, persistence.

Replaces a physical camera rig: every grid pressure triple is pushed through the
analytical forward model and read back with optional Gaussian measurement noise,
averaged over replicates. Each record owns an isolated noise stream derived from
(seed, record index), so simulation order never changes the data.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actuation import ChamberPressures, forward_model
from .errors import UnknownLevel
from .geometry import ActuatorGeometry
from .kinematics import TipPosition

DEFAULT_LEVELS = (0.0, 40.0, 80.0, 120.0, 160.0, 200.0)
DEFAULT_TRAIN_P1_LEVELS = (0.0, 80.0, 160.0)

SPLIT_TRAIN = "train"
SPLIT_TEST = "test"

DATASET_HEADER = ["p1_kPa", "p2_kPa", "p3_kPa", "x_mm", "y_mm", "z_mm", "split"]


@dataclass(frozen=True)
class NoiseModel:
    """Per-axis Gaussian measurement noise (mm) averaged over replicates."""

    sigma: float = 0.5
    replicates: int = 5

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")
        if not (isinstance(self.replicates, int) and self.replicates >= 1):
            raise ValueError(f"replicates must be an int >= 1, got {self.replicates!r}")


@dataclass(frozen=True)
class Provenance:
    """How a dataset was produced; written as the sidecar JSON."""

    geometry: ActuatorGeometry
    sigma: float
    replicates: int
    seed: int
    levels: tuple

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "sigma": self.sigma,
            "replicates": self.replicates,
            "seed": self.seed,
            "levels": list(self.levels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Provenance":
        return cls(
            geometry=ActuatorGeometry.from_dict(d["geometry"]),
            sigma=d["sigma"],
            replicates=d["replicates"],
            seed=d["seed"],
            levels=tuple(d["levels"]),
        )


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Grid pressures (N, 3) kPa, measured tips (N, 3) mm, optional split tags."""

    pressures: np.ndarray
    tips: np.ndarray
    provenance: Provenance
    split: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "pressures", _readonly(self.pressures))
        object.__setattr__(self, "tips", _readonly(self.tips))
        n = self.pressures.shape[0]
        if self.pressures.shape != (n, 3) or self.tips.shape != (n, 3):
            raise ValueError("pressures and tips must both have shape (N, 3)")
        if self.split is not None:
            if len(self.split) != n:
                raise ValueError("split length does not match record count")
            bad = set(self.split) - {SPLIT_TRAIN, SPLIT_TEST}
            if bad:
                raise ValueError(f"unknown split tags: {sorted(bad)}")
            object.__setattr__(self, "split", tuple(self.split))

    def __len__(self) -> int:
        return self.pressures.shape[0]

    def _mask(self, tag: str) -> np.ndarray:
        if self.split is None:
            raise ValueError("dataset has no split tags yet")
        return np.asarray([s == tag for s in self.split])

    @property
    def train_inputs(self) -> np.ndarray:
        return self.tips[self._mask(SPLIT_TRAIN)]

    @property
    def train_targets(self) -> np.ndarray:
        return self.pressures[self._mask(SPLIT_TRAIN)]

    @property
    def test_inputs(self) -> np.ndarray:
        return self.tips[self._mask(SPLIT_TEST)]

    @property
    def test_targets(self) -> np.ndarray:
        return self.pressures[self._mask(SPLIT_TEST)]


def pressure_grid(levels, p_max: float = 200.0) -> list[ChamberPressures]:
    """Full Cartesian product of the levels, lexicographic with p1 outermost.

    Levels must be strictly increasing (guarantees no duplicate triples and a
    numerically lexicographic order) and lie within [0, p_max].
    """
    levels = [float(v) for v in levels]
    if not levels:
        raise ValueError("levels must be nonempty")
    for lo, hi in zip(levels, levels[1:]):
        if not lo < hi:
            raise ValueError(f"levels must be strictly increasing, got {levels!r}")
    if levels[0] < 0.0 or levels[-1] > p_max:
        raise ValueError(f"levels must lie within [0, {p_max}], got {levels!r}")
    return [
        ChamberPressures(*triple)
        for triple in itertools.product(levels, levels, levels)
    ]


def simulate_tip(
    p: ChamberPressures,
    geo: ActuatorGeometry,
    noise: NoiseModel,
    seed: int,
    index: int,
) -> TipPosition:
    """Measure one tip: forward model plus replicate-averaged Gaussian noise.

    sigma = 0 returns the exact forward-model output with no generator draws,
    so noiseless datasets are bit-identical across seeds.
    """
    tip = forward_model(p, geo)
    if noise.sigma == 0.0:
        return tip
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    base = np.asarray(tip.as_tuple())
    acc = np.zeros(3)
    for _ in range(noise.replicates):
        acc += base + rng.normal(0.0, noise.sigma, 3)
    avg = acc / noise.replicates
    return TipPosition(*avg)


def simulate_platform(
    grid, geo: ActuatorGeometry, noise: NoiseModel, seed: int
) -> Dataset:
    """Run the synthetic platform over a pressure grid. Deterministic given seed."""
    if not (isinstance(seed, int) and seed >= 0):
        raise ValueError(f"seed must be a non-negative int, got {seed!r}")
    grid = list(grid)
    pressures = np.asarray([p.as_tuple() for p in grid])
    tips = np.asarray(
        [simulate_tip(p, geo, noise, seed, i).as_tuple() for i, p in enumerate(grid)]
    )
    levels = tuple(sorted(set(pressures.flatten().tolist())))
    prov = Provenance(
        geometry=geo,
        sigma=noise.sigma,
        replicates=noise.replicates,
        seed=seed,
        levels=levels,
    )
    return Dataset(pressures=pressures, tips=tips, provenance=prov)


def split_dataset(ds: Dataset, train_p1_levels) -> Dataset:
    """Tag records train/test by whether p1 is one of the given grid levels."""
    train_levels = {float(v) for v in train_p1_levels}
    known = set(ds.provenance.levels)
    unknown = train_levels - known
    if unknown:
        raise UnknownLevel(
            f"train levels {sorted(unknown)} are not grid levels {sorted(known)}"
        )
    split = tuple(
        SPLIT_TRAIN if p1 in train_levels else SPLIT_TEST for p1 in ds.pressures[:, 0]
    )
    return Dataset(
        pressures=ds.pressures, tips=ds.tips, provenance=ds.provenance, split=split
    )


def _sidecar_path(path) -> Path:
    return Path(path).with_suffix(".provenance.json")


def save_dataset(ds: Dataset, path) -> None:
    """Write the dataset CSV plus its provenance sidecar JSON.

    Floats are serialized with repr (shortest round-trip form), so a write/read
    cycle is lossless and repeated writes are byte-identical.
    """
    if ds.split is None:
        raise ValueError("split the dataset before saving")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for p, tip, tag in zip(ds.pressures, ds.tips, ds.split):
            writer.writerow([repr(float(v)) for v in (*p, *tip)] + [tag])
    with open(_sidecar_path(path), "w") as fh:
        json.dump(ds.provenance.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_dataset(path) -> Dataset:
    """Read a dataset CSV and its provenance sidecar back."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != DATASET_HEADER:
            raise ValueError(f"expected dataset header {DATASET_HEADER}, got {header!r}")
        pressures, tips, split = [], [], []
        for row in reader:
            if not row:
                continue
            if len(row) != 7:
                raise ValueError(f"malformed dataset row: {row!r}")
            vals = [float(v) for v in row[:6]]
            pressures.append(vals[:3])
            tips.append(vals[3:])
            split.append(row[6])
    with open(_sidecar_path(path)) as fh:
        prov = Provenance.from_dict(json.load(fh))
    return Dataset(
        pressures=np.asarray(pressures),
        tips=np.asarray(tips),
        provenance=prov,
        split=tuple(split),
    )
