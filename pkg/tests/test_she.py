"""Residual system, weighted cost, and THD metrics."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from shepso import (
    InverterConfig,
    SheProblem,
    SwitchingAngles,
    cost,
    residuals,
    rms_voltage,
    thd_spectral,
    thd_total,
)
from shepso.she import cost_batch, is_feasible

HALF_PI = math.pi / 2
NEAR_TOP = SwitchingAngles((HALF_PI - 3e-9, HALF_PI - 2e-9, HALF_PI - 1e-9))
SQUARE_WAVE_THD = 0.483425847608679  # sqrt(pi^2/8 - 1)


def oracle_cost(problem: SheProblem, degrees) -> float:
    """Straight-line re-evaluation of the cost from the harmonic sums,
    independent of the vectorized implementation."""
    cfg = problem.cfg
    rads = [math.radians(d) for d in degrees]
    d_vdc = cfg.dc_sources * cfg.vdc
    v1 = 4.0 * cfg.vdc / math.pi * sum(math.cos(a) for a in rads)
    total = problem.weight_fundamental * abs(problem.target_pu - abs(v1) / d_vdc)
    for h in problem.eliminate_orders:
        vh = 4.0 * cfg.vdc / (h * math.pi) * sum(math.cos(h * a) for a in rads)
        total += problem.weight_harmonics * (1.0 / h) * abs(vh) / d_vdc
    return total


class TestProblem:
    def test_defaults(self, ref_cfg):
        p = SheProblem(ref_cfg, 0.8)
        assert p.eliminate_orders == (3, 5)
        assert p.weight_fundamental == 100.0
        assert p.weight_harmonics == 1.0
        assert p.target_v1 == pytest.approx(240.0)

    @pytest.mark.parametrize("target", [0.0, -0.1, 1.01])
    def test_target_range(self, ref_cfg, target):
        with pytest.raises(ValueError):
            SheProblem(ref_cfg, target)

    @pytest.mark.parametrize("orders", [(), (2, 5), (3, 3), (1,), (4,)])
    def test_order_validation(self, ref_cfg, orders):
        with pytest.raises(ValueError):
            SheProblem(ref_cfg, 0.5, eliminate_orders=orders)

    def test_wider_order_sets_allowed(self, ref_cfg):
        p = SheProblem(ref_cfg, 0.5, eliminate_orders=(3, 5, 7, 9))
        assert p.eliminate_orders == (3, 5, 7, 9)


class TestResiduals:
    def test_dimension_mismatch(self, ref_cfg):
        p = SheProblem(ref_cfg, 0.5)
        with pytest.raises(ValueError):
            residuals(p, SwitchingAngles((0.1, 0.2)))

    def test_right_angle_limit(self, ref_cfg):
        p = SheProblem(ref_cfg, 0.5)
        res = residuals(p, NEAR_TOP)
        assert res.fundamental_error == pytest.approx(-150.0, abs=1e-4)
        assert res.harmonic_values == pytest.approx((0.0, 0.0), abs=1e-4)

    def test_full_demand_at_zero_angle_limit(self, ref_cfg):
        p = SheProblem(ref_cfg, 1.0)
        res = residuals(p, SwitchingAngles((1e-9, 2e-9, 3e-9)))
        # headroom between the theoretical max and the 300 V base
        assert res.fundamental_error == pytest.approx(81.9718634205488, rel=1e-9)

    def test_vdc_scaling_linearity(self):
        angles = SwitchingAngles.from_degrees([20, 40, 60])
        lo = SheProblem(InverterConfig(3, 100.0), 0.5)
        hi = SheProblem(InverterConfig(3, 200.0), 0.5)
        r_lo, r_hi = residuals(lo, angles), residuals(hi, angles)
        for a, b in zip(r_lo.harmonic_values, r_hi.harmonic_values):
            assert b == pytest.approx(2 * a, rel=1e-12)


class TestCost:
    def test_matches_independent_oracle(self, ref_cfg):
        cases = [
            (0.5, [10, 20, 30]),
            (0.8, [13.2, 38.0, 82.9]),
            (0.1, [76.4, 89.0, 89.5]),
            (1.0, [5, 15, 25]),
        ]
        for target, degs in cases:
            p = SheProblem(ref_cfg, target)
            got = cost(p, SwitchingAngles.from_degrees(degs))
            assert got == pytest.approx(oracle_cost(p, degs), abs=1e-12)

    def test_frozen_reference_value(self, ref_cfg):
        p = SheProblem(ref_cfg, 0.5)
        got = cost(p, SwitchingAngles.from_degrees([10, 20, 30]))
        assert got == pytest.approx(68.50474778707799, rel=1e-12)

    def test_right_angle_limit_leaves_fundamental_term(self, ref_cfg):
        p = SheProblem(ref_cfg, 0.5)
        assert cost(p, NEAR_TOP) == pytest.approx(100.0 * 0.5, rel=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(min_value=0.01, max_value=HALF_PI - 0.01),
                    min_size=3, max_size=3, unique=True))
    def test_nonnegative(self, vals):
        p = SheProblem(InverterConfig(3, 100.0), 0.7)
        assert cost(p, SwitchingAngles(tuple(sorted(vals)))) >= 0.0

    def test_batch_matches_scalar(self, ref_cfg):
        import numpy as np

        p = SheProblem(ref_cfg, 0.6)
        mats = np.array([
            [0.2, 0.5, 1.0],
            [0.1, 0.9, 1.4],
        ])
        batch = cost_batch(p, mats)
        for row, expected in zip(mats, batch):
            assert cost(p, SwitchingAngles(tuple(row))) == pytest.approx(expected, rel=1e-14)

    def test_batch_dimension_check(self, ref_cfg):
        import numpy as np

        p = SheProblem(ref_cfg, 0.6)
        with pytest.raises(ValueError):
            cost_batch(p, np.zeros((4, 2)))


class TestFeasibility:
    def test_threshold(self, ref_cfg):
        from shepso.she import Residuals

        p = SheProblem(ref_cfg, 0.5)
        ok = Residuals(0.2, (0.2, -0.1))  # all below 0.3 V = 1e-3 * 300 V
        bad = Residuals(0.2, (0.31, 0.0))
        assert is_feasible(p, ok)
        assert not is_feasible(p, bad)
        assert not is_feasible(p, Residuals(0.5, (0.0, 0.0)))


class TestThd:
    def test_square_wave_closed_form(self):
        cfg = InverterConfig(1, 100.0)
        angles = SwitchingAngles((1e-9,))
        assert thd_total(cfg, angles) == pytest.approx(SQUARE_WAVE_THD, abs=1e-6)
        spectral = thd_spectral(cfg, angles, 10001)
        assert spectral <= thd_total(cfg, angles) <= spectral + 5e-3

    def test_spectral_window_validation(self, ref_cfg):
        angles = SwitchingAngles.from_degrees([10, 20, 30])
        with pytest.raises(ValueError):
            thd_spectral(ref_cfg, angles, 1)
        with pytest.raises(ValueError):
            thd_spectral(ref_cfg, angles, 50)

    def test_undefined_at_zero_fundamental(self, ref_cfg):
        # fundamental ~8e-10 V, far below the 1e-9 * vdc floor
        degenerate = SwitchingAngles(
            (HALF_PI - 3e-12, HALF_PI - 2e-12, HALF_PI - 1e-12))
        with pytest.raises(ValueError):
            thd_total(ref_cfg, degenerate)
        with pytest.raises(ValueError):
            thd_spectral(ref_cfg, degenerate, 49)

    def test_monotone_in_window(self, ref_cfg):
        angles = SwitchingAngles.from_degrees([76.4, 89.0, 89.5])
        values = [thd_spectral(ref_cfg, angles, m) for m in (3, 9, 25, 49, 149, 1001)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_spectral_bounded_by_total(self, ref_cfg):
        for degs in ([10, 20, 30], [40, 60, 85], [76.4, 89.0, 89.5]):
            angles = SwitchingAngles.from_degrees(degs)
            assert thd_spectral(ref_cfg, angles, 10001) <= thd_total(ref_cfg, angles)
            assert thd_total(ref_cfg, angles) <= thd_spectral(ref_cfg, angles, 10001) + 5e-3

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(min_value=0.01, max_value=1.2),
                    min_size=3, max_size=3, unique=True))
    def test_total_identity(self, vals):
        # thd^2 + 1 == 2 rms^2 / v1^2, exactly by construction
        cfg = InverterConfig(3, 100.0)
        angles = SwitchingAngles(tuple(sorted(vals)))
        thd = thd_total(cfg, angles)
        rms = rms_voltage(cfg, angles)
        from shepso import fundamental

        v1 = fundamental(cfg, angles)
        assert thd**2 + 1 == pytest.approx(2 * rms**2 / v1**2, rel=1e-10)
