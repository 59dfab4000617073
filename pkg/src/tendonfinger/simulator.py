"""Fixed-step closed-loop simulation of the finger plant and controller."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .controller import ControllerError, ControllerGains, control_step
from .dynamics import ActuatorParams, FingerParams, ReducedState, _coeffs, state_derivative
from .trajectory import TrajectorySpec, sample

CONTROLLER_MODES = ("continuous", "zero_order_hold")


class NonFiniteStage(ArithmeticError):
    pass


class SimulationDiverged(RuntimeError):
    def __init__(self, t: float, last_record: "TraceRecord | None", reason: str = ""):
        self.t = t
        self.last_record = last_record
        msg = f"simulation diverged at t={t!r}"
        if reason:
            msg += f" ({reason})"
        if last_record is not None:
            msg += f"; last record: {last_record}"
        super().__init__(msg)


class TraceRecord(NamedTuple):
    t: float
    x1: float
    theta2: float
    x2: float
    x3: float
    current: float
    x1d: float
    dx1d: float
    e: float
    s: float
    eta: float
    x3d: float
    u: float
    e_volt: float
    v: float
    vdot: float


TRACE_COLUMNS = TraceRecord._fields


@dataclass(frozen=True)
class SimConfig:
    """Closed-loop run description.

    ``dt`` is the record interval; each interval is integrated with
    ``substeps`` RK4 steps.  ``voltage_limit`` clamps the applied voltage
    when set.
    """

    dt: float = 0.01
    t_end: float = 5.0
    x0: ReducedState = ReducedState(0.0, 0.0, 0.0)
    fp: FingerParams = field(default_factory=FingerParams)
    ap: ActuatorParams = field(default_factory=ActuatorParams)
    gains: ControllerGains = field(default_factory=ControllerGains)
    traj: TrajectorySpec = field(default_factory=TrajectorySpec)
    controller_mode: str = "continuous"
    substeps: int = 20
    voltage_limit: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "x0", ReducedState(*(float(v) for v in self.x0)))
        if not all(math.isfinite(v) for v in self.x0):
            raise ValueError("x0 must be finite")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be >= 0, got {self.t_end!r}")
        if 0 < self.t_end < self.dt:
            raise ValueError("t_end must be 0 or at least dt")
        n = round(self.t_end / self.dt)
        if abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ValueError("t_end must be an integer multiple of dt")
        if self.controller_mode not in CONTROLLER_MODES:
            raise ValueError(f"controller_mode must be one of {CONTROLLER_MODES}")
        if not isinstance(self.substeps, int) or self.substeps < 1:
            raise ValueError("substeps must be a positive integer")
        if self.voltage_limit is not None and not self.voltage_limit > 0:
            raise ValueError("voltage_limit must be > 0")

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)


def rk4_step(fun: Callable[[float, Sequence[float]], Sequence[float]], y: Sequence[float],
             t: float, dt: float) -> list[float]:
    """One classical Runge-Kutta step; raises NonFiniteStage on inf/nan."""
    h2 = 0.5 * dt
    k1 = _checked(fun(t, y))
    k2 = _checked(fun(t + h2, [a + h2 * b for a, b in zip(y, k1)]))
    k3 = _checked(fun(t + h2, [a + h2 * b for a, b in zip(y, k2)]))
    k4 = _checked(fun(t + dt, [a + dt * b for a, b in zip(y, k3)]))
    return [a + dt / 6.0 * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


def _checked(k):
    for v in k:
        if not math.isfinite(v):
            raise NonFiniteStage(f"non-finite derivative {tuple(k)}")
    return k


def _clamp(v: float, lim: float | None) -> float:
    if lim is None:
        return v
    return max(-lim, min(lim, v))


def _record(cfg: SimConfig, t: float, y) -> TraceRecord:
    ref = sample(cfg.traj, t)
    st = ReducedState(*y)
    sig = control_step(cfg.fp, cfg.ap, st, ref, cfg.gains)
    return TraceRecord(
        t=t,
        x1=st.x1,
        theta2=cfg.fp.r1 / cfg.fp.r2 * st.x1,
        x2=st.x2,
        x3=st.x3,
        current=st.x3 / cfg.ap.kt,
        x1d=ref.x1d,
        dx1d=ref.dx1d,
        e=sig.e,
        s=sig.s,
        eta=sig.eta,
        x3d=sig.x3d,
        u=sig.u,
        e_volt=_clamp(sig.e_volt, cfg.voltage_limit),
        v=sig.v,
        vdot=sig.vdot,
    )


def closed_loop_rhs(cfg: SimConfig) -> Callable[[float, Sequence[float]], tuple[float, float, float]]:
    """Plant vector field with the controller evaluated at the given state.

    Same arithmetic as ``control_step`` followed by ``state_derivative``,
    flattened into one closure because it runs four times per RK4 step.
    """
    fp, ap, traj, lim = cfg.fp, cfg.ap, cfg.traj, cfg.voltage_limit
    lam, k1, k2 = cfg.gains.lambda_s, cfg.gains.k1, cfg.gains.k2
    k = _coeffs(fp, ap)
    rho, kappa, alpha, beta = k.rho, k.kappa, k.alpha, k.beta
    g1, g2, kred, mrot, brot = k.g1, k.g2, k.kred, k.mrot, k.brot
    l_kt = ap.l / ap.kt
    ra_l = ap.rarm / ap.l
    bemf = ap.kt * ap.kb * fp.r1 / (ap.ra * ap.l)
    kt_l = ap.kt / ap.l
    sin, cos = math.sin, math.cos

    def rhs(t, y):
        x1, x2, x3 = y
        x1d, dx1d, ddx1d, dddx1d = sample(traj, t)
        ang = rho * x1
        sa, ca = sin(ang), cos(ang)
        x12 = x1 + ang
        mpp = kappa * (alpha + beta * ca) + mrot
        if not mpp > 0:
            raise ControllerError(f"combined inertia must be positive, got {mpp!r}")
        n = (kappa * (-0.5 * beta * rho * sa * x2 * x2 + g1 * cos(x1) + g2 * cos(x12) + kred * x1)
             + brot * x2)
        dm = -kappa * beta * rho * sa
        dn1 = kappa * (-0.5 * beta * rho * rho * ca * x2 * x2 - g1 * sin(x1)
                       - (1 + rho) * g2 * sin(x12) + kred)
        dn2 = dm * x2 + brot
        de = x2 - dx1d
        s = de + lam * (x1 - x1d)
        w = ddx1d - lam * de - k1 * s
        x3d = mpp * w + n
        dx2 = (x3 - n) / mpp
        dde = dx2 - ddx1d
        dw = dddx1d - lam * dde - k1 * (dde + lam * de)
        dx3d = dm * x2 * w + mpp * dw + dn1 * x2 + dn2 * dx2
        u = dx3d - k2 * (x3 - x3d) - s / mpp
        e_volt = l_kt * (ra_l * x3 + bemf * x2 + u)
        if lim is not None:
            e_volt = max(-lim, min(lim, e_volt))
        return x2, dx2, -ra_l * x3 - bemf * x2 + kt_l * e_volt

    return rhs


def run(cfg: SimConfig) -> list[TraceRecord]:
    """Integrate the closed loop; one record per ``dt`` including t = 0."""
    fp, ap = cfg.fp, cfg.ap
    h = cfg.dt / cfg.substeps
    y = list(cfg.x0)
    rhs = closed_loop_rhs(cfg)
    trace: list[TraceRecord] = []
    for k in range(cfg.n_steps + 1):
        t = k * cfg.dt
        try:
            rec = _record(cfg, t, y)
        except (ArithmeticError, ValueError) as exc:
            raise SimulationDiverged(t, trace[-1] if trace else None, str(exc)) from exc
        if not all(math.isfinite(v) for v in rec):
            raise SimulationDiverged(t, trace[-1] if trace else None, "non-finite record")
        trace.append(rec)
        if k == cfg.n_steps:
            break
        if cfg.controller_mode == "continuous":
            fun = rhs
        else:
            held = rec.e_volt

            def fun(_t, yy, held=held):
                return state_derivative(fp, ap, ReducedState(*yy), held)

        try:
            for j in range(cfg.substeps):
                y = rk4_step(fun, y, t + j * h, h)
        except (ArithmeticError, ValueError) as exc:
            raise SimulationDiverged(t, rec, str(exc)) from exc
    return trace

