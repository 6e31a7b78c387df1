import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from softik import (
    NoiseModel,
    PressureNet,
    PressureSchedule,
    ReportRow,
    TipPosition,
    Unreachable,
    Waypoint,
    evaluate,
    forward_model,
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
from softik.actuation import ChamberPressures


@pytest.fixture(scope="module")
def waypoints():
    return lemniscate_waypoints()


@pytest.fixture(scope="module")
def analytical_schedule(waypoints, geo):
    return plan(waypoints, geo)


class TestWaypoints:
    def test_default_path_shape(self, waypoints):
        assert len(waypoints) == 41
        assert [w.index for w in waypoints] == list(range(41))
        assert all(w.target.z == 124.0 for w in waypoints)
        first, last = waypoints[0].target, waypoints[-1].target
        assert abs(first.x - last.x) < 1e-12 and abs(first.y - last.y) < 1e-12

    def test_quarter_period_hits_the_lobe_tip(self, waypoints):
        # t = pi/2 falls on sample 10 of 41: x = a, y = 0
        wp = waypoints[10].target
        assert math.isclose(wp.x, 15.0, rel_tol=1e-12)
        assert abs(wp.y) < 1e-12

    def test_amplitudes_scale(self):
        pts = lemniscate_waypoints(a=7.0, b=3.0, z_c=100.0, count=9)
        assert max(abs(w.target.x) for w in pts) <= 7.0 + 1e-12
        assert max(abs(w.target.y) for w in pts) <= 1.5 + 1e-12  # max of sin*cos is 1/2

    def test_degenerate_parameters_rejected(self):
        with pytest.raises(ValueError):
            lemniscate_waypoints(count=1)
        with pytest.raises(ValueError):
            lemniscate_waypoints(z_c=0.0)


class TestPlan:
    def test_analytical_schedule_is_admissible(self, analytical_schedule, geo):
        assert len(analytical_schedule) == 41
        assert analytical_schedule.solver == "analytical"
        assert not any(analytical_schedule.clamped)
        for triple in analytical_schedule.pressures:
            assert all(0.0 <= p <= geo.p_max for p in triple)

    def test_unreachable_waypoint_is_attributed(self, geo):
        tall = lemniscate_waypoints(z_c=200.0)
        with pytest.raises(Unreachable) as exc_info:
            plan(tall, geo)
        assert exc_info.value.waypoint == 0
        assert exc_info.value.p_required > geo.p_max

    def test_bpnet_solver_requires_model(self, waypoints, geo):
        with pytest.raises(ValueError):
            plan(waypoints, geo, solver="bpnet")

    def test_unknown_solver_rejected(self, waypoints, geo):
        with pytest.raises(ValueError):
            plan(waypoints, geo, solver="oracle")

    def test_bpnet_predictions_are_clamped_and_flagged(self, waypoints, geo):
        # a net fitted against absurd negative pressures predicts below zero
        # everywhere, so every waypoint must be clipped and marked
        rng = np.random.default_rng(0)
        X = rng.uniform(-20, 20, (30, 3)) + np.array([0, 0, 124.0])
        y = rng.normal(-500.0, 5.0, (30, 3))
        est = PressureNet(hidden_size=3, n_t=1, n_p=1e-12, seed=0).fit(X, y)
        schedule = plan(waypoints, geo, solver="bpnet", model=est)
        assert schedule.solver == "bpnet"
        assert all(schedule.clamped)
        for triple in schedule.pressures:
            assert all(0.0 <= p <= geo.p_max for p in triple)


class TestEvaluate:
    def test_analytical_loop_closes_exactly(self, analytical_schedule, waypoints, geo):
        report = evaluate(analytical_schedule, waypoints, geo)
        assert report.mean_mm <= 1e-9
        assert report.max_mm <= 1e-9

    def test_zero_schedule_errors_equal_rest_distance(self, geo):
        pts = lemniscate_waypoints(count=5)
        zeros = PressureSchedule(((0.0, 0.0, 0.0),) * 5, "analytical", (False,) * 5)
        report = evaluate(zeros, pts, geo)
        for row, wp in zip(report.rows, pts):
            expected = math.dist(wp.target.as_tuple(), (0.0, 0.0, geo.l0))
            assert math.isclose(row.err_mm, expected, rel_tol=1e-12)

    def test_length_mismatch_rejected(self, analytical_schedule, geo):
        with pytest.raises(ValueError):
            evaluate(analytical_schedule, lemniscate_waypoints(count=11), geo)

    def test_noisy_evaluation_is_seed_deterministic(
        self, analytical_schedule, waypoints, geo
    ):
        noise = NoiseModel(sigma=0.5, replicates=5)
        a = evaluate(analytical_schedule, waypoints, geo, noise=noise, seed=3)
        b = evaluate(analytical_schedule, waypoints, geo, noise=noise, seed=3)
        assert a == b
        c = evaluate(analytical_schedule, waypoints, geo, noise=noise, seed=4)
        assert a.mean_mm != c.mean_mm

    def test_errors_invariant_under_chamber_rotation(self, waypoints, geo):
        # rotating the whole scene by 120 degrees about z permutes the chambers;
        # a deliberately detuned schedule must score identically either way
        base = plan(waypoints, geo)
        detuned = PressureSchedule(
            tuple(tuple(0.97 * p for p in row) for row in base.pressures),
            base.solver,
            base.clamped,
        )
        rot = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
        turned_points = [
            Waypoint(w.index, TipPosition(
                (complex(w.target.x, w.target.y) * rot).real,
                (complex(w.target.x, w.target.y) * rot).imag,
                w.target.z,
            ))
            for w in waypoints
        ]
        turned_schedule = PressureSchedule(
            tuple((p3, p1, p2) for p1, p2, p3 in detuned.pressures),
            detuned.solver,
            detuned.clamped,
        )
        straight = evaluate(detuned, waypoints, geo)
        turned = evaluate(turned_schedule, turned_points, geo)
        assert straight.mean_mm > 1e-3  # the detuning actually bites
        for a, b in zip(straight.rows, turned.rows):
            assert abs(a.err_mm - b.err_mm) <= 1e-9

    def test_relative_error_uses_reference_length(self, analytical_schedule, waypoints, geo):
        report = evaluate(
            analytical_schedule, waypoints, geo, reference_length=60.0
        )
        assert math.isclose(
            report.relative_mean_pct, report.mean_mm / 60.0 * 100.0, rel_tol=1e-12
        )


class TestSummary:
    def test_hand_computed_statistics(self):
        rows = [
            ReportRow(i, (0.0, 0.0, 120.0), (0.0, 0.0, 120.0 + e), e)
            for i, e in enumerate((1.0, 2.0, 3.0))
        ]
        rep = summarize_rows(rows, reference_mm=120.0)
        assert rep.mean_mm == 2.0
        assert rep.max_mm == 3.0
        assert math.isclose(rep.std_mm, math.sqrt(2.0 / 3.0), rel_tol=1e-12)
        assert math.isclose(rep.relative_mean_pct, 2.0 / 120.0 * 100.0, rel_tol=1e-12)

    def test_guards(self):
        with pytest.raises(ValueError):
            summarize_rows([], 120.0)
        row = ReportRow(0, (0, 0, 120), (0, 0, 121), 1.0)
        with pytest.raises(ValueError):
            summarize_rows([row], 0.0)

    def test_summary_dict_round_trips_through_json(self, analytical_schedule, waypoints, geo, tmp_path):
        report = evaluate(analytical_schedule, waypoints, geo)
        path = tmp_path / "summary.json"
        write_summary_json(report, path)
        loaded = json.loads(path.read_text())
        assert loaded == report.summary_dict()
        assert loaded["count"] == 41


class TestPersistence:
    def test_schedule_round_trip(self, analytical_schedule, tmp_path):
        path = tmp_path / "schedule.csv"
        write_schedule_csv(analytical_schedule, path)
        back = load_schedule_csv(path)
        assert back == analytical_schedule

    def test_schedule_rejects_mixed_solvers(self, analytical_schedule, tmp_path):
        path = tmp_path / "schedule.csv"
        write_schedule_csv(analytical_schedule, path)
        lines = path.read_text().splitlines()
        lines[2] = lines[2].replace("analytical", "bpnet")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError):
            load_schedule_csv(path)

    def test_report_round_trip(self, analytical_schedule, waypoints, geo, tmp_path):
        report = evaluate(
            analytical_schedule, waypoints, geo, noise=NoiseModel(0.5, 2), seed=1
        )
        path = tmp_path / "report.csv"
        write_report_csv(report, path)
        rows = load_report_rows(path)
        assert rows == list(report.rows)
        rebuilt = summarize_rows(rows, report.reference_mm)
        assert rebuilt.mean_mm == report.mean_mm
        assert rebuilt.std_mm == report.std_mm

    def test_headers_are_enforced(self, tmp_path):
        bad = tmp_path / "x.csv"
        bad.write_text("foo,bar\n1,2\n")
        with pytest.raises(ValueError):
            load_schedule_csv(bad)
        with pytest.raises(ValueError):
            load_report_rows(bad)

    def test_svg_renders_two_panels(self, analytical_schedule, waypoints, geo, tmp_path):
        report = evaluate(analytical_schedule, waypoints, geo)
        path = tmp_path / "report.svg"
        write_report_svg(report, path)
        text = path.read_text()
        assert text.startswith("<svg")
        root = ET.fromstring(text)
        polylines = root.findall(".//{http://www.w3.org/2000/svg}polyline")
        assert len(polylines) == 4  # target and achieved, top and side views
        for node in polylines:
            assert len(node.attrib["points"].split()) == 41
