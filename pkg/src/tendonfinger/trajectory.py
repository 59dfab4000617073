"""Reference generators with analytic derivatives up to jerk."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .controller import ReferencePoint

KINDS = ("step", "cubic_poly", "cubic_boundary")


@dataclass(frozen=True)
class TrajectorySpec:
    """Reference description.

    ``coeffs`` are ``(a3, a2, a1, a0)`` for ``cubic_poly``; ``t_final`` bounds
    its domain (``None`` means unbounded).  ``boundary`` is
    ``(theta_start, theta_end, duration)`` for ``cubic_boundary``.  With
    ``hold_after`` the reference freezes at the domain end.
    """

    kind: str = "step"
    amplitude: float = math.radians(60.0)
    coeffs: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    boundary: tuple[float, float, float] = (0.0, 0.0, 1.0)
    hold_after: bool = True
    t_final: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        object.__setattr__(self, "boundary", tuple(float(c) for c in self.boundary))
        if len(self.coeffs) != 4:
            raise ValueError("coeffs needs four values (a3, a2, a1, a0)")
        if len(self.boundary) != 3:
            raise ValueError("boundary needs (theta_start, theta_end, duration)")
        vals = (self.amplitude, *self.coeffs, *self.boundary)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("trajectory values must be finite")
        if self.kind == "cubic_boundary" and self.boundary[2] <= 0:
            raise ValueError("duration must be > 0")
        if self.t_final is not None and not self.t_final > 0:
            raise ValueError("t_final must be > 0")


def cubic_from_boundary(theta_start: float, theta_end: float, duration: float) -> tuple[float, float, float, float]:
    """Rest-to-rest cubic ``(a3, a2, a1, a0)`` over ``[0, duration]``."""
    if not duration > 0:
        raise ValueError(f"duration must be > 0, got {duration!r}")
    delta = theta_end - theta_start
    return (-2.0 * delta / duration**3, 3.0 * delta / duration**2, 0.0, theta_start)


def _cubic(coeffs, t: float) -> ReferencePoint:
    a3, a2, a1, a0 = coeffs
    return ReferencePoint(
        ((a3 * t + a2) * t + a1) * t + a0,
        (3 * a3 * t + 2 * a2) * t + a1,
        6 * a3 * t + 2 * a2,
        6 * a3,
    )


def sample(spec: TrajectorySpec, t: float) -> ReferencePoint:
    if spec.kind == "step":
        return ReferencePoint(spec.amplitude, 0.0, 0.0, 0.0)
    if spec.kind == "cubic_poly":
        coeffs, t_end = spec.coeffs, spec.t_final
    else:
        coeffs = cubic_from_boundary(*spec.boundary)
        t_end = spec.boundary[2]
    if spec.hold_after and t_end is not None and t > t_end:
        return ReferencePoint(_cubic(coeffs, t_end).x1d, 0.0, 0.0, 0.0)
    return _cubic(coeffs, t)
