import math
from dataclasses import replace

import pytest

from tendonfinger.dynamics import ReducedState
from tendonfinger.simulator import (
    NonFiniteStage,
    SimConfig,
    SimulationDiverged,
    rk4_step,
    run,
)
from tendonfinger.trajectory import TrajectorySpec


class TestRK4:
    def test_constant(self):
        assert rk4_step(lambda t, y: [0.0], [7.0], 0.0, 0.1) == [7.0]

    def test_exponential_growth_one_step(self):
        h = 0.01
        y = rk4_step(lambda t, y: [y[0]], [1.0], 0.0, h)[0]
        # RK4 reproduces the degree-4 Taylor polynomial of exp(h)
        assert y == pytest.approx(1 + h + h**2 / 2 + h**3 / 6 + h**4 / 24, rel=1e-15)
        assert y == pytest.approx(1.0100501670833334, rel=1e-15)
        assert abs(y - math.exp(h)) < 1e-12

    @pytest.mark.parametrize("n", [10, 20, 40])
    def test_fourth_order(self, n):
        def err(steps):
            y, dt = [1.0], 1.0 / steps
            for k in range(steps):
                y = rk4_step(lambda t, yy: [-yy[0]], y, k * dt, dt)
            return abs(y[0] - math.exp(-1.0))

        assert 12 <= err(n) / err(2 * n) <= 20

    def test_non_finite_stage(self):
        with pytest.raises(NonFiniteStage):
            rk4_step(lambda t, y: [float("nan")], [1.0], 0.0, 0.1)


class TestSimConfig:
    @pytest.mark.parametrize("kw", [{"dt": 0.0}, {"dt": -1.0}, {"t_end": -1.0}, {"t_end": 0.015},
                                    {"t_end": 0.005}, {"substeps": 0}, {"controller_mode": "pid"},
                                    {"voltage_limit": 0.0}, {"x0": (0.0, float("nan"), 0.0)}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            SimConfig(**kw)


class TestRun:
    def test_zero_horizon(self):
        cfg = SimConfig(t_end=0.0, x0=(0.1, 0.2, 0.3))
        trace = run(cfg)
        assert len(trace) == 1
        assert trace[0].t == 0.0
        assert (trace[0].x1, trace[0].x2, trace[0].x3) == (0.1, 0.2, 0.3)

    def test_record_count_and_times(self):
        cfg = SimConfig(t_end=0.5, dt=0.01)
        trace = run(cfg)
        assert len(trace) == 51
        assert [r.t for r in trace] == [k * 0.01 for k in range(51)]

    def test_deterministic(self):
        cfg = SimConfig(t_end=0.3)
        assert run(cfg) == run(cfg)

    def test_record_invariants(self, step_trace, step_cfg):
        ratio = step_cfg.fp.r1 / step_cfg.fp.r2
        for r in step_trace:
            assert r.theta2 == ratio * r.x1
            assert r.current == r.x3 / step_cfg.ap.kt

    def test_step_converges(self, step_trace):
        assert step_trace[-1].t == pytest.approx(5.0)
        assert abs(step_trace[-1].e) < 1e-3

    def test_monotone_lyapunov(self, step_trace, cubic_trace):
        for trace in (step_trace, cubic_trace):
            assert all(b.v <= a.v + 1e-9 for a, b in zip(trace, trace[1:]))

    def test_surface_and_eta_decay(self, step_trace):
        s_peak = max(abs(r.s) for r in step_trace)
        eta_peak = max(abs(r.eta) for r in step_trace)
        assert abs(step_trace[-1].s) < 1e-3 * s_peak
        assert abs(step_trace[-1].eta) < 1e-3 * eta_peak

    def test_divergence_is_reported(self):
        # one RK4 step per 10 ms cannot follow the fast (s, eta) rotation
        cfg = SimConfig(substeps=1, t_end=1.0)
        with pytest.raises(SimulationDiverged) as info:
            run(cfg)
        assert info.value.t < 1.0
        assert info.value.last_record is not None

    def test_zero_order_hold_mode(self):
        # holding E un-cancels the Ra/L pole, so the hold interval must be short
        cfg = SimConfig(dt=2e-5, t_end=0.5, substeps=1, controller_mode="zero_order_hold")
        held = run(cfg)
        cont = run(replace(cfg, controller_mode="continuous"))
        assert abs(held[-1].x1 - cont[-1].x1) < 1e-3
        assert abs(held[-1].e) < abs(held[0].e)

    def test_voltage_clamp(self):
        cfg = SimConfig(t_end=0.5, voltage_limit=24.0)
        trace = run(cfg)
        assert max(abs(r.e_volt) for r in trace) <= 24.0
        assert any(abs(r.e_volt) == 24.0 for r in trace)

    def test_initial_condition_used(self):
        cfg = SimConfig(t_end=0.01, x0=ReducedState(0.2, 0.0, 0.0),
                        traj=TrajectorySpec("step", amplitude=0.2))
        assert run(cfg)[0].x1 == 0.2

    def test_halving_dt(self, step_cfg, step_trace):
        fine = run(replace(step_cfg, dt=0.005))
        assert abs(fine[-1].x1 - step_trace[-1].x1) < 1e-6
