"""Finger, slider and DC-motor dynamics.

Full two-link model::

    M(theta) theta'' + C(theta, theta') theta' + G(theta) + K theta = tau + A^T lam

Joint 2 is slaved to joint 1 by the tendon routing, ``theta = D theta1`` with
``D = [1, r1/r2]``.  Projecting through ``D`` and eliminating the slider and
motor shaft through ``x = ra phi = r1 theta1`` leaves one scalar plant in
``theta1`` driven by the motor torque ``tau_a``::

    mpp(x1) x1'' + cpp(x1, x2) + gpp(x1) + kpp(x1) = tau_a

with::

    mpp = (ra/r1) D^T M D + (r1/ra) (J + ms ra^2)
    cpp = ((ra/r1) D^T C D + (r1/ra) B) x2
    gpp = (ra/r1) D^T G
    kpp = (ra/r1) D^T K D x1

Gravity acts in the finger plane and pulls the links toward ``theta = -pi/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class FingerParams:
    """Geometry, inertia, springs and pulleys of the two-link finger.

    ``lc1``/``lc2`` default to half the link length and ``i1``/``i2`` to a
    uniform rod about its centre when left as ``None``.
    """

    m1: float = 0.05
    m2: float = 0.04
    l1: float = 0.06
    l2: float = 0.04
    lc1: float | None = None
    lc2: float | None = None
    i1: float | None = None
    i2: float | None = None
    r1: float = 0.01
    r2: float = 0.008
    k1s: float = 0.05
    k2s: float = 0.05
    grav: float = 9.81

    def __post_init__(self):
        if self.lc1 is None:
            object.__setattr__(self, "lc1", self.l1 / 2)
        if self.lc2 is None:
            object.__setattr__(self, "lc2", self.l2 / 2)
        if self.i1 is None:
            object.__setattr__(self, "i1", self.m1 * self.l1**2 / 12)
        if self.i2 is None:
            object.__setattr__(self, "i2", self.m2 * self.l2**2 / 12)
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"{f.name} must be a finite number, got {v!r}")
        for name in ("m1", "m2", "l1", "l2", "r1", "r2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("lc1", "lc2", "i1", "i2", "k1s", "k2s", "grav"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.lc1 > self.l1:
            raise ValueError("lc1 must not exceed l1")
        if self.lc2 > self.l2:
            raise ValueError("lc2 must not exceed l2")


@dataclass(frozen=True)
class ActuatorParams:
    """Slider mass plus DC-motor mechanical and electrical constants."""

    j: float = 1.5e-4
    b: float = 0.03
    ra: float = 0.01
    ms: float = 0.02
    l: float = 1e-3
    rarm: float = 1.0
    kt: float = 0.05
    kb: float = 0.05

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"{f.name} must be a finite number, got {v!r}")
            # zero damping is allowed, every other constant must be positive
            if v < 0 or (v == 0 and f.name != "b"):
                raise ValueError(f"{f.name} must be > 0, got {v!r}")


class FullJointState(NamedTuple):
    theta: np.ndarray
    dtheta: np.ndarray


class ReducedState(NamedTuple):
    x1: float  # proximal angle, rad
    x2: float  # proximal rate, rad/s
    x3: float  # motor torque, N*m


class ReducedTerms(NamedTuple):
    mpp: float
    cpp: float  # velocity torque, already multiplied by x2
    gpp: float
    kpp: float  # spring torque, already multiplied by x1


# --- full two-link model ---------------------------------------------------


def _inertia_constants(p: FingerParams) -> tuple[float, float, float]:
    a = p.i1 + p.i2 + p.m1 * p.lc1**2 + p.m2 * (p.l1**2 + p.lc2**2)
    b = p.m2 * p.l1 * p.lc2
    c = p.i2 + p.m2 * p.lc2**2
    return a, b, c


def mass_matrix(p: FingerParams, theta) -> np.ndarray:
    a, b, c = _inertia_constants(p)
    c2 = math.cos(theta[1])
    m12 = c + b * c2
    return np.array([[a + 2 * b * c2, m12], [m12, c]])


def coriolis_matrix(p: FingerParams, theta, dtheta) -> np.ndarray:
    """Christoffel-symbol Coriolis matrix; ``dM/dt - 2C`` is skew-symmetric."""
    _, b, _ = _inertia_constants(p)
    h = -b * math.sin(theta[1])
    dq1, dq2 = dtheta
    return np.array([[h * dq2, h * (dq1 + dq2)], [-h * dq1, 0.0]])


def gravity_vector(p: FingerParams, theta) -> np.ndarray:
    q1, q2 = theta
    g12 = p.m2 * p.lc2 * p.grav * math.cos(q1 + q2)
    g1 = (p.m1 * p.lc1 + p.m2 * p.l1) * p.grav * math.cos(q1) + g12
    return np.array([g1, g12])


def spring_torque(p: FingerParams, theta) -> np.ndarray:
    return np.array([p.k1s * theta[0], p.k2s * theta[1]])


def constraint_row(p: FingerParams) -> np.ndarray:
    return np.array([[1.0, -p.r2 / p.r1]])


def reduction_vector(p: FingerParams) -> np.ndarray:
    return np.array([[1.0], [p.r1 / p.r2]])


def expand_state(p: FingerParams, x1: float, x2: float) -> FullJointState:
    rho = p.r1 / p.r2
    return FullJointState(np.array([x1, rho * x1]), np.array([x2, rho * x2]))


# --- reduced plant ---------------------------------------------------------


class _Coeffs(NamedTuple):
    rho: float  # r1/r2
    kappa: float  # ra/r1
    nu: float  # r1/ra
    alpha: float  # D^T M D = alpha + beta cos(rho x1)
    beta: float
    g1: float  # gravity moment coefficients of cos(x1) and cos((1+rho) x1)
    g2: float
    kred: float  # D^T K D
    mrot: float  # nu (J + ms ra^2)
    brot: float  # nu B


@lru_cache(maxsize=64)
def _coeffs(fp: FingerParams, ap: ActuatorParams) -> _Coeffs:
    a, b, c = _inertia_constants(fp)
    rho = fp.r1 / fp.r2
    nu = fp.r1 / ap.ra
    return _Coeffs(
        rho=rho,
        kappa=ap.ra / fp.r1,
        nu=nu,
        alpha=a + 2 * rho * c + rho * rho * c,
        beta=2 * b * (1 + rho),
        g1=(fp.m1 * fp.lc1 + fp.m2 * fp.l1) * fp.grav,
        g2=(1 + rho) * fp.m2 * fp.lc2 * fp.grav,
        kred=fp.k1s + rho * rho * fp.k2s,
        mrot=nu * (ap.j + ap.ms * ap.ra**2),
        brot=nu * ap.b,
    )


def _terms(k: _Coeffs, x1: float, x2: float) -> ReducedTerms:
    ang = k.rho * x1
    mp = k.alpha + k.beta * math.cos(ang)
    cp = -0.5 * k.beta * k.rho * math.sin(ang) * x2 * x2
    gp = k.g1 * math.cos(x1) + k.g2 * math.cos(x1 + ang)
    return ReducedTerms(
        mpp=k.kappa * mp + k.mrot,
        cpp=k.kappa * cp + k.brot * x2,
        gpp=k.kappa * gp,
        kpp=k.kappa * k.kred * x1,
    )


def _terms_partials(k: _Coeffs, x1: float, x2: float) -> tuple[float, float, float]:
    """d(mpp)/dx1, and d/dx1, d/dx2 of ``cpp + gpp + kpp``."""
    ang = k.rho * x1
    s, c = math.sin(ang), math.cos(ang)
    dm = -k.kappa * k.beta * k.rho * s
    dn1 = k.kappa * (
        -0.5 * k.beta * k.rho * k.rho * c * x2 * x2
        - k.g1 * math.sin(x1)
        - (1 + k.rho) * k.g2 * math.sin(x1 + ang)
        + k.kred
    )
    dn2 = -k.kappa * k.beta * k.rho * s * x2 + k.brot
    return dm, dn1, dn2


def reduced_terms(fp: FingerParams, ap: ActuatorParams, x1: float, x2: float) -> ReducedTerms:
    return _terms(_coeffs(fp, ap), x1, x2)


def drift_and_gain(terms: ReducedTerms) -> tuple[float, float]:
    g = 1.0 / terms.mpp
    return (-terms.cpp - terms.gpp - terms.kpp) * g, g


def state_derivative(fp: FingerParams, ap: ActuatorParams, s: ReducedState, e_volt: float) -> tuple[float, float, float]:
    x1, x2, x3 = s
    f, g = drift_and_gain(reduced_terms(fp, ap, x1, x2))
    dx3 = (-ap.rarm * x3 - ap.kt * ap.kb * fp.r1 / ap.ra * x2 + ap.kt * e_volt) / ap.l
    return x2, f + g * x3, dx3


def tendon_force_sum(fp: FingerParams, ap: ActuatorParams, x1: float, x2: float, x1dd: float) -> float:
    """Total tendon force ``f1 + f2`` from the finger-side reduced equation.

    Only the sum is determined; the split between the two tendons is not.
    """
    k = _coeffs(fp, ap)
    ang = k.rho * x1
    mp = k.alpha + k.beta * math.cos(ang)
    cp = -0.5 * k.beta * k.rho * math.sin(ang) * x2 * x2
    gp = k.g1 * math.cos(x1) + k.g2 * math.cos(x1 + ang)
    return (mp * x1dd + cp + gp + k.kred * x1) / fp.r1


def lagrange_multiplier(fp: FingerParams, x1: float, x2: float, x1dd: float, tau) -> float:
    """Constraint multiplier from the part of the full equation along ``A^T``.

    Least-squares fit of ``A^T lam`` to the residual of the unconstrained
    two-link equation; exact whenever ``tau`` is consistent with the reduced
    model (``D^T tau = r1 (f1 + f2)``).
    """
    st = expand_state(fp, x1, x2)
    dd = np.array([x1dd, fp.r1 / fp.r2 * x1dd])
    resid = (
        mass_matrix(fp, st.theta) @ dd
        + coriolis_matrix(fp, st.theta, st.dtheta) @ st.dtheta
        + gravity_vector(fp, st.theta)
        + spring_torque(fp, st.theta)
        - np.asarray(tau, dtype=float)
    )
    a = constraint_row(fp)[0]
    return float(a @ resid / (a @ a))
