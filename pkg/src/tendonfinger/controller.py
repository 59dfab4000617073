"""Backstepping voltage controller for the reduced finger plant.

State ``(x1, x2, x3) = (theta1, theta1', tau_a)``.  The voltage law first
cancels the armature dynamics so that ``x3' = u``, then::

    e   = x1 - x1d,            s = e' + lambda_s e
    x3d = (1/g)(-f + x1d'' - lambda_s e' - k1 s)
    eta = x3 - x3d
    u   = x3d' - k2 eta - g s

which gives ``s' = g eta - k1 s``, ``eta' = -k2 eta - g s`` and
``V = (s^2 + eta^2)/2`` with ``V' = -k1 s^2 - k2 eta^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .dynamics import (
    ActuatorParams,
    FingerParams,
    ReducedState,
    _coeffs,
    _terms,
    _terms_partials,
)


class ControllerError(ValueError):
    """Raised when the plant gain loses positivity."""


@dataclass(frozen=True)
class ControllerGains:
    lambda_s: float = 3.4
    k1: float = 28.0
    k2: float = 40.0

    def __post_init__(self):
        for name in ("lambda_s", "k1", "k2"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be a finite number > 0, got {v!r}")


class ReferencePoint(NamedTuple):
    x1d: float
    dx1d: float = 0.0
    ddx1d: float = 0.0
    dddx1d: float = 0.0


class ControlSignals(NamedTuple):
    e: float
    de: float
    s: float
    x3d: float
    dx3d: float
    eta: float
    u: float
    e_volt: float
    v: float
    vdot: float


def error_surface(x1: float, x2: float, ref: ReferencePoint, gains: ControllerGains) -> tuple[float, float, float]:
    e = x1 - ref.x1d
    de = x2 - ref.dx1d
    return e, de, de + gains.lambda_s * e


def virtual_control(f: float, g: float, ref: ReferencePoint, e: float, de: float, s: float,
                    gains: ControllerGains) -> float:
    if not g > 0:
        raise ControllerError(f"plant gain g must be positive, got {g!r}")
    return (-f + ref.ddx1d - gains.lambda_s * de - gains.k1 * s) / g


def _virtual_control_and_rate(fp, ap, state, ref, gains):
    # x3d = mpp * w + n with w = x1d'' - lambda e' - k1 s and n = cpp + gpp + kpp,
    # differentiated along x1' = x2, x2' = (x3 - n)/mpp.
    x1, x2, x3 = state
    k = _coeffs(fp, ap)
    t = _terms(k, x1, x2)
    if not t.mpp > 0:
        raise ControllerError(f"combined inertia must be positive, got {t.mpp!r}")
    dm, dn1, dn2 = _terms_partials(k, x1, x2)
    lam, k1 = gains.lambda_s, gains.k1
    e = x1 - ref.x1d
    de = x2 - ref.dx1d
    s = de + lam * e
    n = t.cpp + t.gpp + t.kpp
    w = ref.ddx1d - lam * de - k1 * s
    x3d = t.mpp * w + n
    dx2 = (x3 - n) / t.mpp
    dde = dx2 - ref.ddx1d
    ds = dde + lam * de
    dw = ref.dddx1d - lam * dde - k1 * ds
    dx3d = dm * x2 * w + t.mpp * dw + dn1 * x2 + dn2 * dx2
    return t.mpp, e, de, s, x3d, dx3d


def virtual_control_rate(fp: FingerParams, ap: ActuatorParams, state: ReducedState,
                         ref: ReferencePoint, gains: ControllerGains) -> float:
    """Analytic time derivative of the virtual control along the plant flow."""
    return _virtual_control_and_rate(fp, ap, state, ref, gains)[5]


def torque_loop(dx3d: float, eta: float, g: float, s: float, gains: ControllerGains) -> float:
    return dx3d - gains.k2 * eta - g * s


def voltage_law(ap: ActuatorParams, fp: FingerParams, x2: float, x3: float, u: float) -> float:
    return (ap.l / ap.kt) * (ap.rarm / ap.l * x3 + ap.kt * ap.kb * fp.r1 / (ap.ra * ap.l) * x2 + u)


def lyapunov(s: float, eta: float) -> float:
    return 0.5 * (s * s + eta * eta)


def lyapunov_rate(s: float, eta: float, gains: ControllerGains) -> float:
    return -gains.k1 * s * s - gains.k2 * eta * eta


def control_step(fp: FingerParams, ap: ActuatorParams, state: ReducedState,
                 ref: ReferencePoint, gains: ControllerGains) -> ControlSignals:
    mpp, e, de, s, x3d, dx3d = _virtual_control_and_rate(fp, ap, state, ref, gains)
    g = 1.0 / mpp
    eta = state[2] - x3d
    u = dx3d - gains.k2 * eta - g * s
    return ControlSignals(
        e=e,
        de=de,
        s=s,
        x3d=x3d,
        dx3d=dx3d,
        eta=eta,
        u=u,
        e_volt=voltage_law(ap, fp, state[1], state[2], u),
        v=lyapunov(s, eta),
        vdot=lyapunov_rate(s, eta, gains),
    )
