"""Trace metrics, Lyapunov audit and numerical oracles for the finger model."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .controller import ControllerGains, lyapunov_rate
from .dynamics import ActuatorParams, FingerParams
from .simulator import TraceRecord


@dataclass(frozen=True)
class StepMetrics:
    settling_time: float | None  # None when the band is never permanently entered
    overshoot: float  # percent of |amplitude|
    steady_state_error: float
    band: float = 0.02

    @property
    def settled(self) -> bool:
        return self.settling_time is not None


@dataclass(frozen=True)
class TrackingMetrics:
    max_abs_error: float
    rms_error: float
    window_start: float = 1.0


@dataclass(frozen=True)
class AuditReport:
    max_increase: float  # largest V[k+1] - V[k], 0 when V never rises
    violation_indices: list[int] = field(default_factory=list)
    max_rate_residual: float = 0.0  # max |centered dV/dt - (-k1 s^2 - k2 eta^2)|
    max_abs_rate: float = 0.0

    @property
    def n_violations(self) -> int:
        return len(self.violation_indices)


def step_metrics(trace: Sequence[TraceRecord], amplitude: float, band: float = 0.02) -> StepMetrics:
    if not trace:
        raise ValueError("empty trace")
    if amplitude == 0:
        raise ValueError("amplitude must be non-zero")
    t = np.array([r.t for r in trace])
    x = np.array([r.x1 for r in trace])
    outside = np.flatnonzero(np.abs(x - amplitude) > band * abs(amplitude))
    if outside.size == 0:
        settling = float(t[0])
    elif outside[-1] == len(x) - 1:
        settling = None
    else:
        settling = float(t[outside[-1] + 1])
    peak = float(np.max(math.copysign(1.0, amplitude) * (x - amplitude)))
    return StepMetrics(
        settling_time=settling,
        overshoot=max(0.0, peak) / abs(amplitude) * 100.0,
        steady_state_error=abs(float(x[-1]) - amplitude),
        band=band,
    )


def tracking_metrics(trace: Sequence[TraceRecord], window_start: float = 1.0) -> TrackingMetrics:
    err = np.array([r.x1 - r.x1d for r in trace if r.t >= window_start])
    if err.size == 0:
        raise ValueError(f"no samples at or after window_start={window_start}")
    return TrackingMetrics(
        max_abs_error=float(np.max(np.abs(err))),
        rms_error=float(np.sqrt(np.mean(err**2))),
        window_start=window_start,
    )


def lyapunov_audit(trace: Sequence[TraceRecord], gains: ControllerGains, tol: float = 1e-9) -> AuditReport:
    """Check V is non-increasing and that its centred derivative matches V'.

    A violation at index ``k`` means ``V[k] > V[k-1] + tol``.  The rate
    residual is measured at interior samples, so it shrinks as ``dt**2`` once
    ``dt`` resolves the closed-loop dynamics.
    """
    if len(trace) < 3:
        raise ValueError("audit needs at least 3 records")
    t = np.array([r.t for r in trace])
    v = np.array([r.v for r in trace])
    rate = np.array([lyapunov_rate(r.s, r.eta, gains) for r in trace])
    dv = np.diff(v)
    viol = [int(i) + 1 for i in np.flatnonzero(dv > tol)]
    centred = (v[2:] - v[:-2]) / (t[2:] - t[:-2])
    return AuditReport(
        max_increase=max(0.0, float(np.max(dv))),
        violation_indices=viol,
        max_rate_residual=float(np.max(np.abs(centred - rate[1:-1]))),
        max_abs_rate=float(np.max(np.abs(rate))),
    )


# --- oracles ---------------------------------------------------------------

_CSTEP = 1e-30


def _link_poses(fp: FingerParams, q):
    """Centre-of-mass positions and absolute link angles (complex-safe)."""
    q1, q2 = q
    c1, s1 = np.cos(q1), np.sin(q1)
    c12, s12 = np.cos(q1 + q2), np.sin(q1 + q2)
    p1 = (fp.lc1 * c1, fp.lc1 * s1)
    p2 = (fp.l1 * c1 + fp.lc2 * c12, fp.l1 * s1 + fp.lc2 * s12)
    return p1, p2, (q1, q1 + q2)


def kinetic_energy(fp: FingerParams, theta, dtheta) -> float:
    # velocities by complex-step differentiation of forward kinematics
    q = np.asarray(theta, dtype=complex) + 1j * _CSTEP * np.asarray(dtheta, dtype=float)
    p1, p2, phi = _link_poses(fp, q)
    v1 = [np.imag(c) / _CSTEP for c in p1]
    v2 = [np.imag(c) / _CSTEP for c in p2]
    w1, w2 = (np.imag(a) / _CSTEP for a in phi)
    return 0.5 * (fp.m1 * (v1[0] ** 2 + v1[1] ** 2) + fp.m2 * (v2[0] ** 2 + v2[1] ** 2)
                  + fp.i1 * w1**2 + fp.i2 * w2**2)


def potential_energy(fp: FingerParams, theta) -> float:
    p1, p2, _ = _link_poses(fp, np.asarray(theta, dtype=float))
    return fp.grav * (fp.m1 * p1[1] + fp.m2 * p2[1])


def _momentum(fp, theta, dtheta):
    # T is quadratic in the rates, so a unit central difference is exact
    dq = np.asarray(dtheta, dtype=float)
    out = np.empty(2)
    for i in range(2):
        e = np.eye(2)[i]
        out[i] = (kinetic_energy(fp, theta, dq + e) - kinetic_energy(fp, theta, dq - e)) / 2.0
    return out


def lagrangian_oracle(fp: FingerParams, theta, dtheta, h: float = 1e-6):
    """``(M, C dtheta, G)`` from energy functions only.

    M is the rate Hessian of kinetic energy, G the gradient of potential
    energy, and ``C dtheta = d/dt(dT/d dtheta) - dT/dtheta`` at zero
    acceleration.  Angle derivatives use central differences with step ``h``.
    """
    q = np.asarray(theta, dtype=float)
    dq = np.asarray(dtheta, dtype=float)
    eye = np.eye(2)
    zero = np.zeros(2)
    m = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            a, b = eye[i], eye[j]
            m[i, j] = (kinetic_energy(fp, q, a + b) - kinetic_energy(fp, q, a - b)
                       - kinetic_energy(fp, q, b - a) + kinetic_energy(fp, q, zero - a - b)) / 4.0
    dp_dt = (_momentum(fp, q + h * dq, dq) - _momentum(fp, q - h * dq, dq)) / (2 * h)
    dt_dq = np.array([(kinetic_energy(fp, q + h * e, dq) - kinetic_energy(fp, q - h * e, dq)) / (2 * h)
                      for e in eye])
    g = np.array([(potential_energy(fp, q + h * e) - potential_energy(fp, q - h * e)) / (2 * h)
                  for e in eye])
    return m, dp_dt - dt_dq, g


def eliminated_acceleration(fp: FingerParams, ap: ActuatorParams, x1: float, x2: float, x3: float,
                            h: float = 1e-6) -> float:
    """Proximal acceleration from the unreduced finger, slider and motor.

    Solves the joint, slider and shaft equations together with the tendon
    kinematics ``x = ra phi = r1 theta1 = r2 theta2``, with every inertia
    and velocity term taken from ``lagrangian_oracle``.  The split between
    the two tendon forces and the constraint multiplier is gauge-fixed by
    setting the multiplier to zero.
    """
    rho = fp.r1 / fp.r2
    theta = np.array([x1, rho * x1])
    dtheta = np.array([x2, rho * x2])
    m, cdq, g = lagrangian_oracle(fp, theta, dtheta, h)
    rhs_joint = -(cdq + g + np.array([fp.k1s * theta[0], fp.k2s * theta[1]]))
    dphi = fp.r1 / ap.ra * x2
    # unknowns: theta1'', theta2'', f1, f2, f, phi'', x''
    a = np.zeros((7, 7))
    b = np.zeros(7)
    a[0, 0:2], a[0, 2] = m[0], -fp.r1
    a[1, 0:2], a[1, 3] = m[1], -fp.r2
    b[0:2] = rhs_joint
    a[2, 6], a[2, 4], a[2, 2], a[2, 3] = ap.ms, -1.0, 1.0, 1.0
    a[3, 5], a[3, 4] = ap.j, ap.ra
    b[3] = x3 - ap.b * dphi
    a[4, 6], a[4, 5] = 1.0, -ap.ra
    a[5, 6], a[5, 0] = 1.0, -fp.r1
    a[6, 6], a[6, 1] = 1.0, -fp.r2
    return float(np.linalg.solve(a, b)[0])
