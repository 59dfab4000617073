import math

import numpy as np
import pytest

from helpers import synthetic_trace
from tendonfinger.analysis import (
    lagrangian_oracle,
    lyapunov_audit,
    step_metrics,
    tracking_metrics,
)
from tendonfinger.controller import ControllerGains
from tendonfinger.dynamics import FingerParams, coriolis_matrix, gravity_vector, mass_matrix

GAINS = ControllerGains()


class TestStepMetrics:
    def test_already_at_target(self):
        t = np.arange(0, 1.001, 0.01)
        m = step_metrics(synthetic_trace(t, np.full_like(t, 0.7)), 0.7)
        assert m.settling_time == 0.0 and m.overshoot == 0.0 and m.settled

    def test_first_order(self):
        tau, dt = 0.25, 1e-3
        t = np.arange(0, 3.0 + dt / 2, dt)
        m = step_metrics(synthetic_trace(t, 1.3 * (1 - np.exp(-t / tau))), 1.3, band=0.02)
        assert abs(m.settling_time - tau * math.log(50)) <= dt
        assert tau * math.log(50) == pytest.approx(0.978, abs=1e-4)
        assert m.overshoot == 0.0

    def test_critically_damped_second_order(self):
        w, dt = 4.0, 1e-3
        t = np.arange(0, 4.0 + dt / 2, dt)
        x = 1.0 - (1 + w * t) * np.exp(-w * t)
        # oracle: bisection on (1 + w t) exp(-w t) = 0.02
        lo, hi = 0.0, 4.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if (1 + w * mid) * math.exp(-w * mid) > 0.02 else (lo, mid)
        m = step_metrics(synthetic_trace(t, x), 1.0)
        assert abs(m.settling_time - hi) <= dt

    def test_overshoot_and_negative_amplitude(self):
        t = np.linspace(0, 1, 11)
        x = np.array([0, -0.5, -1.1, -1.05, -1, -1, -1, -1, -1, -1, -1.0])
        m = step_metrics(synthetic_trace(t, x), -1.0)
        assert m.overshoot == pytest.approx(10.0)

    def test_not_settled(self):
        t = np.linspace(0, 1, 11)
        m = step_metrics(synthetic_trace(t, t * 0.5), 1.0)
        assert m.settling_time is None and not m.settled

    def test_rejects_zero_amplitude(self):
        with pytest.raises(ValueError):
            step_metrics(synthetic_trace([0.0], [0.0]), 0.0)

    def test_step_run_no_overshoot(self, step_trace):
        m = step_metrics(step_trace, math.radians(60))
        assert m.overshoot < 0.1


class TestTrackingMetrics:
    def test_perfect(self):
        t = np.linspace(0, 5, 51)
        m = tracking_metrics(synthetic_trace(t, np.sin(t), np.sin(t)), 1.0)
        assert (m.max_abs_error, m.rms_error) == (0.0, 0.0)

    def test_constant_error(self):
        t = np.linspace(0, 5, 51)
        m = tracking_metrics(synthetic_trace(t, t + 0.001, t), 1.0)
        assert m.max_abs_error == pytest.approx(0.001)
        assert m.rms_error == pytest.approx(0.001)

    def test_window_excludes_transient(self):
        t = np.linspace(0, 5, 51)
        x1 = np.where(t < 1.0, 1.0, 0.0)
        assert tracking_metrics(synthetic_trace(t, x1), 1.0).max_abs_error == 0.0
        assert tracking_metrics(synthetic_trace(t, x1), 0.0).max_abs_error == 1.0

    def test_cubic_run(self, cubic_trace):
        m = tracking_metrics(cubic_trace, 1.0)
        assert m.rms_error <= m.max_abs_error
        assert m.max_abs_error < 1e-3


class TestAudit:
    def test_equilibrium(self):
        t = np.linspace(0, 1, 11)
        rep = lyapunov_audit(synthetic_trace(t, np.zeros(11)), GAINS)
        assert rep.n_violations == 0 and rep.max_rate_residual == 0.0 and rep.max_increase == 0.0

    def test_step_run(self, step_trace):
        rep = lyapunov_audit(step_trace, GAINS)
        assert rep.n_violations == 0
        assert rep.max_increase < 1e-9

    def test_fault_injection(self, step_trace):
        corrupted = list(step_trace)
        corrupted[137] = corrupted[137]._replace(v=corrupted[136].v + 1.0)
        rep = lyapunov_audit(corrupted, GAINS)
        assert rep.violation_indices == [137]

    def test_needs_three_records(self):
        with pytest.raises(ValueError):
            lyapunov_audit(synthetic_trace([0.0, 0.1], [0.0, 0.0]), GAINS)


class TestOracle:
    def test_no_gravity(self):
        _, _, g = lagrangian_oracle(FingerParams(grav=0.0), (0.4, -0.3), (1.0, 2.0))
        assert np.max(np.abs(g)) < 1e-9

    def test_zero_rates(self):
        _, cdq, _ = lagrangian_oracle(FingerParams(), (0.4, -0.3), (0.0, 0.0))
        assert np.max(np.abs(cdq)) < 1e-8

    def test_agrees_with_closed_forms(self):
        fp = FingerParams()
        rng = np.random.default_rng(11)
        for _ in range(20):
            q, dq = rng.uniform(-np.pi, np.pi, 2), rng.uniform(-3, 3, 2)
            m, cdq, g = lagrangian_oracle(fp, q, dq)
            assert np.linalg.norm(m - mass_matrix(fp, q)) < 1e-6 * np.linalg.norm(m)
            assert np.linalg.norm(cdq - coriolis_matrix(fp, q, dq) @ dq) < 1e-6 * np.linalg.norm(cdq)
            assert np.linalg.norm(g - gravity_vector(fp, q)) < 1e-6 * np.linalg.norm(g)

    def test_step_size_consistency(self):
        fp = FingerParams()
        q, dq = (0.3, 0.5), (1.0, -0.5)
        a = lagrangian_oracle(fp, q, dq, h=1e-6)
        b = lagrangian_oracle(fp, q, dq, h=2e-6)
        for x, y in zip(a, b):
            assert np.linalg.norm(x - y) < 1e-8 * np.linalg.norm(x)
