"""Command-line front end wiring the pipeline: generate, calibrate, train, sweep,
plan, evaluate, report.

Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 numerical failure.
All outputs are deterministic given the config file and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from sklearn.exceptions import NotFittedError

from .actuation import calibrate, load_calibration_csv
from .bpnet import PressureNet, hidden_sweep, mape, r_squared
from .config import RunConfig
from .datagen import (
    load_dataset,
    pressure_grid,
    save_dataset,
    simulate_platform,
    split_dataset,
)
from .errors import (
    BracketFailure,
    ConfigError,
    DegenerateGeometry,
    DivergedLoss,
    InfiniteRadius,
    NonPositiveLength,
    NonPositiveZ,
    SoftikError,
    Unreachable,
)
from .trajectory import (
    evaluate,
    lemniscate_waypoints,
    load_report_rows,
    load_schedule_csv,
    plan,
    summarize_rows,
    write_report_csv,
    write_report_svg,
    write_schedule_csv,
    write_summary_json,
)

_NUMERICAL_ERRORS = (
    DivergedLoss,
    Unreachable,
    BracketFailure,
    InfiniteRadius,
    NonPositiveZ,
    NonPositiveLength,
    DegenerateGeometry,
)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON run-config file (defaults apply if omitted)")
    sub.add_argument("--seed", type=int, help="override the config seed")
    sub.add_argument("--out", help="output file path (default: under the config out_dir)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softik",
        description="Inverse-kinematics pipeline for a three-chamber soft actuator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="simulate the pressure-grid dataset")
    _add_common(p)

    p = sub.add_parser("calibrate", help="fit the compliance parameter from a CSV")
    _add_common(p)
    p.add_argument("--samples", required=True, help="calibration CSV (P_kPa,length_mm)")

    p = sub.add_parser("train", help="train the pressure network on a dataset")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset CSV from `generate`")

    p = sub.add_parser("sweep", help="hidden-width trial-and-error sweep")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset CSV from `generate`")

    p = sub.add_parser("plan", help="compute a pressure schedule for the figure-8")
    _add_common(p)
    p.add_argument(
        "--solver", choices=["analytical", "bpnet"], default="analytical",
        help="which inverse model plans the schedule",
    )
    p.add_argument("--model", help="model JSON (required with --solver bpnet)")

    p = sub.add_parser("evaluate", help="play a schedule back and score the errors")
    _add_common(p)
    p.add_argument("--schedule", required=True, help="schedule CSV from `plan`")
    p.add_argument("--svg", action="store_true", help="also render the path views")

    p = sub.add_parser("report", help="recompute the summary of an existing report")
    _add_common(p)
    p.add_argument("--report", required=True, help="report CSV from `evaluate`")
    p.add_argument("--svg", action="store_true", help="also render the path views")

    return parser


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {args.seed}")
        cfg = cfg.with_seed(args.seed)
    return cfg


def _out_path(args, cfg: RunConfig, default_name: str) -> Path:
    return Path(args.out) if args.out else Path(cfg.out_dir) / default_name


def _cmd_generate(args) -> int:
    cfg = _load_config(args)
    grid = pressure_grid(cfg.data.levels, p_max=cfg.geometry.p_max)
    ds = simulate_platform(grid, cfg.geometry, cfg.noise, cfg.seed)
    ds = split_dataset(ds, cfg.data.train_p1_levels)
    out = _out_path(args, cfg, "dataset.csv")
    save_dataset(ds, out)
    n_train = len(ds.train_inputs)
    print(f"records={len(ds)} train={n_train} test={len(ds) - n_train} -> {out}")
    return 0


def _cmd_calibrate(args) -> int:
    cfg = _load_config(args)
    samples = load_calibration_csv(args.samples)
    fit = calibrate(samples, cfg.geometry)
    out = _out_path(args, cfg, "calibration.json")
    with open(out, "w") as fh:
        json.dump(
            {
                "k_hat_per_mpa": fit.k_hat,
                "mu0_hat_mpa": fit.mu0_hat,
                "residual_mpa": fit.residual,
                "n_samples": len(samples),
            },
            fh,
            sort_keys=True,
            indent=2,
        )
        fh.write("\n")
    print(f"k_hat = {fit.k_hat:.6g} MPa^-1")
    print(f"mu0_hat = {fit.mu0_hat:.6g} MPa")
    print(f"residual = {fit.residual:.3e} MPa -> {out}")
    return 0


def _fitted_net(cfg: RunConfig, ds) -> PressureNet:
    est = PressureNet(
        hidden_size=cfg.network.m,
        eta=cfg.network.eta,
        n_t=cfg.network.n_t,
        n_p=cfg.network.n_p,
        seed=cfg.seed,
        init_half_width=cfg.network.init_half_width,
        output_activation=cfg.network.output_activation,
        standardize_targets=cfg.network.standardize_targets,
    )
    return est.fit(ds.train_inputs, ds.train_targets)


def _require_both_splits(ds) -> None:
    if ds.split is None:
        raise ValueError("dataset has no split tags")
    if len(ds.train_inputs) == 0 or len(ds.test_inputs) == 0:
        raise ValueError("dataset needs nonempty train and test splits")


def _cmd_train(args) -> int:
    cfg = _load_config(args)
    ds = load_dataset(args.data)
    _require_both_splits(ds)
    est = _fitted_net(cfg, ds)
    preds = est.predict(ds.test_inputs)
    mape_res = mape(preds, ds.test_targets)
    r2 = r_squared(preds, ds.test_targets)
    out = _out_path(args, cfg, "model.json")
    est.save(out)
    hist = est.history_
    print(f"final train MSE (standardized): {hist.mse[-1]:.6g} "
          f"after {len(hist.mse)} epochs ({hist.stop_reason})")
    print(f"test MAPE: {mape_res.percent:.3f}% over {mape_res.eligible} components")
    print(f"test R^2: {r2:.5f}")
    print(f"MAC count: {hist.macs}")
    print(f"model -> {out}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    ds = load_dataset(args.data)
    _require_both_splits(ds)
    base = cfg.network.to_config(seed=cfg.seed)
    result = hidden_sweep(
        base,
        cfg.sweep.seeds,
        ds.train_inputs,
        ds.train_targets,
        ds.test_inputs,
        ds.test_targets,
    )
    out = _out_path(args, cfg, "sweep.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["m", "seed", "final_mse", "test_r2", "error"])
        for row in result.rows:
            writer.writerow(
                [row.m, row.seed, repr(row.final_mse), repr(row.test_r2),
                 row.error or ""]
            )
    print(f"rows={len(result.rows)} selected m={result.selected_m} -> {out}")
    return 0


def _cmd_plan(args) -> int:
    cfg = _load_config(args)
    waypoints = lemniscate_waypoints(
        a=cfg.trajectory.a,
        b=cfg.trajectory.b,
        z_c=cfg.trajectory.z_c,
        count=cfg.trajectory.count,
    )
    model = None
    if args.solver == "bpnet":
        if not args.model:
            raise ConfigError("--model is required with the bpnet solver")
        model = PressureNet.load(args.model)
    schedule = plan(waypoints, cfg.geometry, solver=args.solver, model=model)
    out = _out_path(args, cfg, "schedule.csv")
    write_schedule_csv(schedule, out)
    print(
        f"planned {len(schedule)} waypoints solver={schedule.solver} "
        f"clamped={sum(schedule.clamped)} -> {out}"
    )
    return 0


def _print_summary(report) -> None:
    print(
        f"waypoints={len(report.rows)} mean={report.mean_mm:.6g} mm "
        f"max={report.max_mm:.6g} mm std={report.std_mm:.6g} mm "
        f"relative={report.relative_mean_pct:.4g}% of {report.reference_mm:g} mm"
    )


def _cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    schedule = load_schedule_csv(args.schedule)
    waypoints = lemniscate_waypoints(
        a=cfg.trajectory.a,
        b=cfg.trajectory.b,
        z_c=cfg.trajectory.z_c,
        count=cfg.trajectory.count,
    )
    report = evaluate(
        schedule,
        waypoints,
        cfg.geometry,
        noise=cfg.noise,
        seed=cfg.seed,
        reference_length=cfg.trajectory.reference_length,
    )
    out = _out_path(args, cfg, "report.csv")
    write_report_csv(report, out)
    write_summary_json(report, out.with_suffix(".summary.json"))
    if args.svg:
        write_report_svg(report, out.with_suffix(".svg"))
    _print_summary(report)
    print(f"report -> {out}")
    return 0


def _cmd_report(args) -> int:
    cfg = _load_config(args)
    rows = load_report_rows(args.report)
    ref = (
        cfg.trajectory.reference_length
        if cfg.trajectory.reference_length is not None
        else cfg.geometry.l0
    )
    report = summarize_rows(rows, ref)
    out = _out_path(args, cfg, "summary.json")
    write_summary_json(report, out)
    if args.svg:
        write_report_svg(report, out.with_suffix(".svg"))
    _print_summary(report)
    print(f"summary -> {out}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "calibrate": _cmd_calibrate,
    "train": _cmd_train,
    "sweep": _cmd_sweep,
    "plan": _cmd_plan,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SoftikError, ValueError, NotFittedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
