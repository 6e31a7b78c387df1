"""Run configuration: one JSON file (plus CLI overrides) pins a whole pipeline.

Every block is validated strictly; unknown keys and out-of-range values raise
ConfigError with the offending field path (e.g. "noise.sigma").
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

from .bpnet import OUTPUT_ACTIVATIONS, NetworkConfig
from .datagen import DEFAULT_LEVELS, DEFAULT_TRAIN_P1_LEVELS, NoiseModel
from .errors import ConfigError
from .geometry import ActuatorGeometry


def _fail(path: str, msg: str):
    raise ConfigError(f"{path} {msg}")


def _num(path: str, v, *, ge=None, gt=None, allow_none=False):
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        _fail(path, f"must be a finite number, got {v!r}")
    if ge is not None and v < ge:
        _fail(path, f"must be >= {ge}, got {v!r}")
    if gt is not None and v <= gt:
        _fail(path, f"must be > {gt}, got {v!r}")
    return float(v)


def _int(path: str, v, *, ge=None, le=None):
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(path, f"must be an integer, got {v!r}")
    if ge is not None and v < ge:
        _fail(path, f"must be >= {ge}, got {v!r}")
    if le is not None and v > le:
        _fail(path, f"must be <= {le}, got {v!r}")
    return v


def _bool(path: str, v):
    if not isinstance(v, bool):
        _fail(path, f"must be a boolean, got {v!r}")
    return v


def _choice(path: str, v, options):
    if v not in options:
        _fail(path, f"must be one of {list(options)}, got {v!r}")
    return v


def _check_keys(d: dict, allowed, path: str):
    if not isinstance(d, dict):
        _fail(path or "config", f"must be an object, got {type(d).__name__}")
    unknown = set(d) - set(allowed)
    if unknown:
        key = sorted(unknown)[0]
        where = f"{path}.{key}" if path else key
        raise ConfigError(f"unknown key '{where}'")


@dataclass(frozen=True)
class NetworkSettings:
    """Network block of the run config; the run seed completes NetworkConfig."""

    m: int = 13
    eta: float = 0.01
    n_t: int = 500
    n_p: float = 0.01
    init_half_width: float = 0.5
    output_activation: str = "identity"
    standardize_targets: bool = True

    def to_config(self, seed: int) -> NetworkConfig:
        return NetworkConfig(
            m=self.m,
            eta=self.eta,
            n_t=self.n_t,
            n_p=self.n_p,
            seed=seed,
            init_half_width=self.init_half_width,
            output_activation=self.output_activation,
            standardize_targets=self.standardize_targets,
        )


@dataclass(frozen=True)
class DataSettings:
    levels: tuple = DEFAULT_LEVELS
    train_p1_levels: tuple = DEFAULT_TRAIN_P1_LEVELS


@dataclass(frozen=True)
class TrajectorySettings:
    a: float = 15.0
    b: float = 15.0
    z_c: float = 124.0
    count: int = 41
    reference_length: float | None = None


@dataclass(frozen=True)
class SweepSettings:
    seeds: tuple = (0, 1, 2, 3, 4)


def _parse_geometry(d: dict) -> ActuatorGeometry:
    allowed = ("d", "l0", "k", "area_ratio", "mu0", "p_max")
    _check_keys(d, allowed, "geometry")
    kwargs: dict[str, Any] = {}
    for key in ("d", "l0", "k", "area_ratio", "p_max"):
        if key in d:
            kwargs[key] = _num(f"geometry.{key}", d[key], gt=0.0)
    if "mu0" in d:
        kwargs["mu0"] = _num("geometry.mu0", d["mu0"], gt=0.0, allow_none=True)
    try:
        return ActuatorGeometry(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from None


def _parse_noise(d: dict) -> NoiseModel:
    _check_keys(d, ("sigma", "replicates"), "noise")
    kwargs: dict[str, Any] = {}
    if "sigma" in d:
        kwargs["sigma"] = _num("noise.sigma", d["sigma"], ge=0.0)
    if "replicates" in d:
        kwargs["replicates"] = _int("noise.replicates", d["replicates"], ge=1)
    return NoiseModel(**kwargs)


def _parse_network(d: dict) -> NetworkSettings:
    allowed = (
        "m",
        "eta",
        "n_t",
        "n_p",
        "init_half_width",
        "output_activation",
        "standardize_targets",
    )
    _check_keys(d, allowed, "network")
    kwargs: dict[str, Any] = {}
    if "m" in d:
        kwargs["m"] = _int("network.m", d["m"], ge=3, le=13)
    if "eta" in d:
        kwargs["eta"] = _num("network.eta", d["eta"], gt=0.0)
    if "n_t" in d:
        kwargs["n_t"] = _int("network.n_t", d["n_t"], ge=1)
    if "n_p" in d:
        kwargs["n_p"] = _num("network.n_p", d["n_p"], gt=0.0)
    if "init_half_width" in d:
        kwargs["init_half_width"] = _num(
            "network.init_half_width", d["init_half_width"], ge=0.0
        )
    if "output_activation" in d:
        kwargs["output_activation"] = _choice(
            "network.output_activation", d["output_activation"], OUTPUT_ACTIVATIONS
        )
    if "standardize_targets" in d:
        kwargs["standardize_targets"] = _bool(
            "network.standardize_targets", d["standardize_targets"]
        )
    return NetworkSettings(**kwargs)


def _parse_levels(path: str, v) -> tuple:
    if not isinstance(v, (list, tuple)) or not v:
        _fail(path, f"must be a nonempty list of numbers, got {v!r}")
    out = tuple(_num(f"{path}[{i}]", x, ge=0.0) for i, x in enumerate(v))
    for lo, hi in zip(out, out[1:]):
        if not lo < hi:
            _fail(path, f"must be strictly increasing, got {list(out)!r}")
    return out


def _parse_data(d: dict) -> DataSettings:
    _check_keys(d, ("levels", "train_p1_levels"), "data")
    kwargs: dict[str, Any] = {}
    if "levels" in d:
        kwargs["levels"] = _parse_levels("data.levels", d["levels"])
    if "train_p1_levels" in d:
        kwargs["train_p1_levels"] = _parse_levels(
            "data.train_p1_levels", d["train_p1_levels"]
        )
    return DataSettings(**kwargs)


def _parse_trajectory(d: dict) -> TrajectorySettings:
    _check_keys(d, ("a", "b", "z_c", "count", "reference_length"), "trajectory")
    kwargs: dict[str, Any] = {}
    if "a" in d:
        kwargs["a"] = _num("trajectory.a", d["a"], ge=0.0)
    if "b" in d:
        kwargs["b"] = _num("trajectory.b", d["b"], ge=0.0)
    if "z_c" in d:
        kwargs["z_c"] = _num("trajectory.z_c", d["z_c"], gt=0.0)
    if "count" in d:
        kwargs["count"] = _int("trajectory.count", d["count"], ge=2)
    if "reference_length" in d:
        kwargs["reference_length"] = _num(
            "trajectory.reference_length", d["reference_length"], gt=0.0, allow_none=True
        )
    return TrajectorySettings(**kwargs)


def _parse_sweep(d: dict) -> SweepSettings:
    _check_keys(d, ("seeds",), "sweep")
    kwargs: dict[str, Any] = {}
    if "seeds" in d:
        v = d["seeds"]
        if not isinstance(v, (list, tuple)) or not v:
            _fail("sweep.seeds", f"must be a nonempty list of integers, got {v!r}")
        kwargs["seeds"] = tuple(
            _int(f"sweep.seeds[{i}]", x, ge=0) for i, x in enumerate(v)
        )
    return SweepSettings(**kwargs)


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run needs; (config, seed) determines all outputs."""

    seed: int = 0
    out_dir: str = "."
    geometry: ActuatorGeometry = field(default_factory=ActuatorGeometry)
    noise: NoiseModel = field(default_factory=NoiseModel)
    network: NetworkSettings = field(default_factory=NetworkSettings)
    data: DataSettings = field(default_factory=DataSettings)
    trajectory: TrajectorySettings = field(default_factory=TrajectorySettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not isinstance(self.out_dir, str):
            raise ConfigError(f"out_dir must be a string, got {self.out_dir!r}")

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        allowed = (
            "seed",
            "out_dir",
            "geometry",
            "noise",
            "network",
            "data",
            "trajectory",
            "sweep",
        )
        _check_keys(d, allowed, "")
        kwargs: dict[str, Any] = {}
        if "seed" in d:
            kwargs["seed"] = _int("seed", d["seed"], ge=0)
        if "out_dir" in d:
            if not isinstance(d["out_dir"], str):
                _fail("out_dir", f"must be a string, got {d['out_dir']!r}")
            kwargs["out_dir"] = d["out_dir"]
        parsers = {
            "geometry": _parse_geometry,
            "noise": _parse_noise,
            "network": _parse_network,
            "data": _parse_data,
            "trajectory": _parse_trajectory,
            "sweep": _parse_sweep,
        }
        for key, parser in parsers.items():
            if key in d:
                kwargs[key] = parser(d[key])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        return cls.from_dict(raw)
