import math

import numpy as np
import pytest

from softik import (
    ArcParameters,
    BracketFailure,
    ChamberPressures,
    DegenerateFit,
    InsufficientData,
    TipPosition,
    Unreachable,
    analytical_ik,
    arc_to_chamber_lengths,
    arc_to_tip,
    calibrate,
    forward_model,
    length_to_pressure,
    load_calibration_csv,
    pressure_to_length,
    tip_to_arc,
)


def law_pressure_kpa(li, geo):
    # the material law written out independently of the implementation
    r = li / geo.l0
    return (r - r**-3) / geo.k * 1000.0


class TestMaterialLaw:
    def test_rest_length_is_zero_pressure(self, geo):
        assert length_to_pressure(geo.l0, geo) == 0.0
        assert math.isclose(pressure_to_length(0.0, geo), geo.l0, rel_tol=1e-12)

    def test_ten_percent_elongation_pressure(self, geo):
        p = length_to_pressure(1.1 * geo.l0, geo)
        assert math.isclose(p, law_pressure_kpa(1.1 * geo.l0, geo), rel_tol=1e-12)
        assert abs(p - 163.86) < 5e-3

    def test_round_trip_to_sub_nano_kpa(self, geo):
        rng = np.random.default_rng(5)
        for p in rng.uniform(0.0, geo.p_max, 1000):
            back = length_to_pressure(pressure_to_length(float(p), geo), geo)
            assert abs(back - p) <= 1e-9

    def test_extension_ratio_at_full_pressure(self, geo):
        ratio = pressure_to_length(geo.p_max, geo) / pressure_to_length(0.0, geo)
        assert abs(ratio - 1.126) < 5e-4

    def test_length_increases_with_pressure(self, geo):
        lengths = [pressure_to_length(p, geo) for p in range(0, 201, 10)]
        assert all(a < b for a, b in zip(lengths, lengths[1:]))

    def test_negative_pressure_below_solvable_floor(self, geo):
        with pytest.raises(BracketFailure):
            pressure_to_length(-5.0, geo)

    def test_pressure_beyond_bracket_range(self, geo):
        # elongation caps at 3 - 1/27 on the bracket; ~1393 kPa exceeds it
        with pytest.raises(BracketFailure):
            pressure_to_length(2000.0, geo)

    def test_nonpositive_length_rejected(self, geo):
        with pytest.raises(ValueError):
            length_to_pressure(0.0, geo)


class TestCalibration:
    @staticmethod
    def exact_samples(geo, n=20):
        return [
            (float(p), pressure_to_length(float(p), geo))
            for p in np.linspace(10.0, 200.0, n)
        ]

    def test_recovers_compliance_from_exact_data(self, geo):
        fit = calibrate(self.exact_samples(geo), geo)
        assert abs(fit.k_hat - geo.k) <= 1e-9 * geo.k
        assert math.isclose(fit.mu0_hat, geo.area_ratio / fit.k_hat, rel_tol=1e-12)
        assert abs(fit.mu0_hat - 1.197) < 2e-3
        assert fit.residual < 1e-9

    def test_one_percent_pressure_noise_stays_within_two_percent(self, geo):
        # recorded pressures off by 1 percent multiplicative noise; the chamber
        # actually held the true pressure, so lengths come from the clean value
        rng = np.random.default_rng(7)
        samples = [
            (p * (1.0 + 0.01 * rng.standard_normal()), li)
            for p, li in self.exact_samples(geo)
        ]
        fit = calibrate(samples, geo)
        assert abs(fit.k_hat - geo.k) <= 0.02 * geo.k

    def test_too_few_samples(self, geo):
        with pytest.raises(InsufficientData):
            calibrate(self.exact_samples(geo)[:2], geo)

    def test_identical_pressures_rejected(self, geo):
        li = pressure_to_length(50.0, geo)
        with pytest.raises(DegenerateFit):
            calibrate([(50.0, li)] * 4, geo)

    def test_csv_round_trip(self, geo, tmp_path):
        samples = self.exact_samples(geo, n=6)
        path = tmp_path / "cal.csv"
        with open(path, "w") as fh:
            fh.write("P_kPa,length_mm\n")
            for p, li in samples:
                fh.write(f"{p!r},{li!r}\n")
        assert load_calibration_csv(path) == samples

    def test_csv_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("pressure,len\n10,120\n")
        with pytest.raises(ValueError):
            load_calibration_csv(path)


class TestInverseKinematics:
    def test_reference_tip_pressures(self, geo):
        tip = arc_to_tip(ArcParameters(127.2, 0.4, 0.0))
        ps = analytical_ik(tip, geo)
        assert abs(ps.p1 - 103.56) < 5e-3
        assert abs(ps.p2 - 158.22) < 5e-3
        assert abs(ps.p3 - 43.40) < 5e-3

    def test_forward_then_inverse_is_identity(self, geo):
        rng = np.random.default_rng(99)
        for _ in range(100):
            p = ChamberPressures(*rng.uniform(0.0, geo.p_max, 3))
            back = analytical_ik(forward_model(p, geo), geo)
            assert max(
                abs(a - b) for a, b in zip(back.as_tuple(), p.as_tuple())
            ) <= 1e-6

    def test_equal_pressures_keep_tip_on_axis(self, geo):
        tip = forward_model(ChamberPressures(100.0, 100.0, 100.0), geo)
        assert tip.x == 0.0 and tip.y == 0.0
        # z = mean of three identical chamber lengths, so (3a)/3 may sit 1 ulp off a
        assert tip.z == pytest.approx(pressure_to_length(100.0, geo), rel=1e-15, abs=0.0)

    def test_chamber_permutation_rotates_tip(self, geo):
        # shifting pressures one chamber over rotates the bend by +120 degrees
        a, b, c = 120.0, 60.0, 30.0
        t1 = forward_model(ChamberPressures(a, b, c), geo)
        t2 = forward_model(ChamberPressures(c, a, b), geo)
        rot = complex(t1.x, t1.y) * complex(
            math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)
        )
        assert abs(t2.x - rot.real) <= 1e-9
        assert abs(t2.y - rot.imag) <= 1e-9
        assert abs(t2.z - t1.z) <= 1e-9

    def test_unreachable_reports_first_offending_chamber(self, geo):
        arc = ArcParameters(140.0, 1.2, 0.5)
        tip = arc_to_tip(arc)
        demanded = [
            length_to_pressure(li, geo)
            for li in arc_to_chamber_lengths(tip_to_arc(tip), geo).as_tuple()
        ]
        offending = next(
            i for i, p in enumerate(demanded, start=1) if p < 0 or p > geo.p_max
        )
        with pytest.raises(Unreachable) as exc_info:
            analytical_ik(tip, geo)
        exc = exc_info.value
        assert exc.chamber == offending
        assert math.isclose(exc.p_required, demanded[offending - 1], rel_tol=1e-9)
        assert exc.waypoint is None

    def test_contraction_demands_are_unreachable(self, geo):
        # z below the rest length would need vacuum; no negative-pressure supply
        with pytest.raises(Unreachable) as exc_info:
            analytical_ik(TipPosition(0.0, 0.0, 110.0), geo)
        assert exc_info.value.p_required < 0.0

    def test_forward_model_rejects_inadmissible_input(self, geo):
        with pytest.raises(ValueError):
            forward_model(ChamberPressures(-1.0, 0.0, 0.0), geo)
        with pytest.raises(ValueError):
            forward_model(ChamberPressures(0.0, geo.p_max + 1.0, 0.0), geo)
