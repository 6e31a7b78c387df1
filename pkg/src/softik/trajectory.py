"""Figure-8 trajectory experiment: waypoints, pressure schedules, error reports.

A closed Gerono-style eight at constant height is sampled into waypoints; an
inverse model (analytical chain or trained network) turns each waypoint into a
pressure triple; the forward model then plays the schedule back and the report
collects per-waypoint Euclidean errors with Table-style summary statistics.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actuation import ChamberPressures, analytical_ik, forward_model
from .bpnet import PressureNet
from .datagen import NoiseModel, simulate_tip
from .errors import Unreachable
from .geometry import ActuatorGeometry
from .kinematics import TipPosition

SOLVER_ANALYTICAL = "analytical"
SOLVER_BPNET = "bpnet"

SCHEDULE_HEADER = ["index", "p1_kPa", "p2_kPa", "p3_kPa", "solver", "clamped"]
REPORT_HEADER = ["index", "tx", "ty", "tz", "ax", "ay", "az", "err_mm"]


@dataclass(frozen=True)
class Waypoint:
    index: int
    target: TipPosition


@dataclass(frozen=True)
class PressureSchedule:
    """Per-waypoint pressure triples plus the solver tag and clamp flags."""

    pressures: tuple
    solver: str
    clamped: tuple

    def __post_init__(self):
        if self.solver not in (SOLVER_ANALYTICAL, SOLVER_BPNET):
            raise ValueError(f"unknown solver tag {self.solver!r}")
        if len(self.clamped) != len(self.pressures):
            raise ValueError("clamped flags must align with pressures")
        object.__setattr__(self, "pressures", tuple(self.pressures))
        object.__setattr__(self, "clamped", tuple(bool(c) for c in self.clamped))

    def __len__(self) -> int:
        return len(self.pressures)


@dataclass(frozen=True)
class ReportRow:
    index: int
    target: tuple
    achieved: tuple
    err_mm: float


@dataclass(frozen=True)
class TrajectoryReport:
    """Per-waypoint rows plus summary statistics (all mm except the percent)."""

    rows: tuple
    mean_mm: float
    max_mm: float
    std_mm: float
    relative_mean_pct: float
    reference_mm: float

    def summary_dict(self) -> dict:
        return {
            "count": len(self.rows),
            "mean_mm": self.mean_mm,
            "max_mm": self.max_mm,
            "std_mm": self.std_mm,
            "relative_mean_pct": self.relative_mean_pct,
            "reference_mm": self.reference_mm,
        }


def lemniscate_waypoints(
    a: float = 15.0, b: float = 15.0, z_c: float = 124.0, count: int = 41
) -> list[Waypoint]:
    """Sample the closed figure-8 x = a sin t, y = b sin t cos t at height z_c.

    t runs uniformly over [0, 2*pi] with `count` samples, so the first and last
    waypoints coincide in (x, y) and the XOY projection is the full eight.
    """
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    if z_c <= 0:
        raise ValueError(f"z_c must be positive, got {z_c!r}")
    ts = np.linspace(0.0, 2.0 * math.pi, count)
    return [
        Waypoint(i, TipPosition(a * math.sin(t), b * math.sin(t) * math.cos(t), z_c))
        for i, t in enumerate(ts)
    ]


def plan(
    waypoints,
    geo: ActuatorGeometry,
    solver: str = SOLVER_ANALYTICAL,
    model: PressureNet | None = None,
) -> PressureSchedule:
    """Compute the open-loop pressure schedule for a waypoint list.

    The analytical solver raises Unreachable (annotated with the waypoint index)
    for targets outside the workspace. The network solver has no hard
    constraint, so its predictions are clamped into [0, p_max] and each clamped
    waypoint is flagged.
    """
    waypoints = list(waypoints)
    if solver == SOLVER_ANALYTICAL:
        pressures = []
        for wp in waypoints:
            try:
                pressures.append(analytical_ik(wp.target, geo).as_tuple())
            except Unreachable as exc:
                raise Unreachable(
                    chamber=exc.chamber, p_required=exc.p_required, waypoint=wp.index
                ) from None
        clamped = (False,) * len(pressures)
        return PressureSchedule(tuple(pressures), SOLVER_ANALYTICAL, clamped)
    if solver == SOLVER_BPNET:
        if model is None:
            raise ValueError("the bpnet solver needs a trained model")
        tips = np.asarray([wp.target.as_tuple() for wp in waypoints])
        raw = model.predict(tips)
        clipped = np.clip(raw, 0.0, geo.p_max)
        clamped = tuple(bool(np.any(r != c)) for r, c in zip(raw, clipped))
        pressures = tuple(tuple(float(v) for v in row) for row in clipped)
        return PressureSchedule(pressures, SOLVER_BPNET, clamped)
    raise ValueError(f"unknown solver {solver!r}")


def summarize_rows(rows, reference_mm: float) -> TrajectoryReport:
    """Assemble a report from per-waypoint rows; summary fields are recomputed."""
    rows = tuple(rows)
    if not rows:
        raise ValueError("report needs at least one row")
    if reference_mm <= 0:
        raise ValueError(f"reference length must be positive, got {reference_mm!r}")
    errs = np.asarray([r.err_mm for r in rows])
    mean = float(errs.mean())
    return TrajectoryReport(
        rows=rows,
        mean_mm=mean,
        max_mm=float(errs.max()),
        std_mm=float(errs.std()),
        relative_mean_pct=mean / reference_mm * 100.0,
        reference_mm=float(reference_mm),
    )


def evaluate(
    schedule: PressureSchedule,
    waypoints,
    geo: ActuatorGeometry,
    noise: NoiseModel | None = None,
    seed: int = 0,
    reference_length: float | None = None,
) -> TrajectoryReport:
    """Play a schedule through the forward model and score it against the targets.

    Optional measurement noise uses the same replicate-averaged protocol as the
    data platform, with one isolated stream per waypoint. The relative error is
    reported against reference_length (the rest length by default).
    """
    waypoints = list(waypoints)
    if len(schedule) != len(waypoints):
        raise ValueError(
            f"schedule has {len(schedule)} entries for {len(waypoints)} waypoints"
        )
    if noise is None:
        noise = NoiseModel(sigma=0.0, replicates=1)
    rows = []
    for wp, triple in zip(waypoints, schedule.pressures):
        achieved = simulate_tip(ChamberPressures(*triple), geo, noise, seed, wp.index)
        err = math.dist(achieved.as_tuple(), wp.target.as_tuple())
        rows.append(
            ReportRow(
                index=wp.index,
                target=wp.target.as_tuple(),
                achieved=achieved.as_tuple(),
                err_mm=err,
            )
        )
    ref = geo.l0 if reference_length is None else reference_length
    return summarize_rows(rows, ref)


def write_schedule_csv(schedule: PressureSchedule, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SCHEDULE_HEADER)
        for i, (triple, clamped) in enumerate(zip(schedule.pressures, schedule.clamped)):
            writer.writerow(
                [i]
                + [repr(float(v)) for v in triple]
                + [schedule.solver, int(clamped)]
            )


def load_schedule_csv(path) -> PressureSchedule:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SCHEDULE_HEADER:
            raise ValueError(f"expected schedule header {SCHEDULE_HEADER}, got {header!r}")
        pressures, clamped, solvers = [], [], set()
        for row in reader:
            if not row:
                continue
            if len(row) != 6:
                raise ValueError(f"malformed schedule row: {row!r}")
            pressures.append((float(row[1]), float(row[2]), float(row[3])))
            solvers.add(row[4])
            clamped.append(bool(int(row[5])))
    if not pressures:
        raise ValueError("schedule file has no rows")
    if len(solvers) != 1:
        raise ValueError(f"schedule mixes solver tags: {sorted(solvers)}")
    return PressureSchedule(tuple(pressures), solvers.pop(), tuple(clamped))


def write_report_csv(report: TrajectoryReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for r in report.rows:
            writer.writerow(
                [r.index]
                + [repr(float(v)) for v in (*r.target, *r.achieved, r.err_mm)]
            )


def load_report_rows(path) -> list[ReportRow]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != REPORT_HEADER:
            raise ValueError(f"expected report header {REPORT_HEADER}, got {header!r}")
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != 8:
                raise ValueError(f"malformed report row: {row!r}")
            vals = [float(v) for v in row[1:]]
            rows.append(
                ReportRow(
                    index=int(row[0]),
                    target=tuple(vals[0:3]),
                    achieved=tuple(vals[3:6]),
                    err_mm=vals[6],
                )
            )
    if not rows:
        raise ValueError("report file has no rows")
    return rows


def write_summary_json(report: TrajectoryReport, path) -> None:
    with open(path, "w") as fh:
        json.dump(report.summary_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _svg_panel(rows, proj, x0: float, title: str) -> list[str]:
    # proj picks (horizontal, vertical) coordinates out of a 3-tuple
    size, pad = 280.0, 30.0
    tgt = [proj(r.target) for r in rows]
    ach = [proj(r.achieved) for r in rows]
    xs = [p[0] for p in tgt + ach]
    ys = [p[1] for p in tgt + ach]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    scale = (size - 2 * pad) / span

    def to_px(p):
        # center the data span in the panel; flip the vertical axis
        cx = x0 + size / 2 + (p[0] - (xmin + xmax) / 2) * scale
        cy = size / 2 - (p[1] - (ymin + ymax) / 2) * scale
        return f"{cx:.2f},{cy:.2f}"

    def polyline(pts, color, dash):
        attrs = f' stroke-dasharray="{dash}"' if dash else ""
        return (
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{attrs} '
            f'points="{" ".join(to_px(p) for p in pts)}"/>'
        )

    return [
        f'<text x="{x0 + size / 2:.0f}" y="16" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{title}</text>',
        polyline(tgt, "#1f77b4", "4 3"),
        polyline(ach, "#d62728", ""),
    ]


def write_report_svg(report: TrajectoryReport, path) -> None:
    """Render target (dashed blue) vs achieved (red) paths, top and side views."""
    rows = report.rows
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="600" height="300" '
        'viewBox="0 0 600 300">',
        '<rect width="600" height="300" fill="white"/>',
    ]
    parts += _svg_panel(rows, lambda p: (p[0], p[1]), 10.0, "top view (x-y)")
    parts += _svg_panel(rows, lambda p: (p[0], p[2]), 310.0, "side view (x-z)")
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
