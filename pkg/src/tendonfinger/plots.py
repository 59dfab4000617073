"""Static figures derived from a trace."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .simulator import TraceRecord  # noqa: E402

FIGURES = (
    "fig3_step_response",
    "fig4_tracking_error",
    "fig5_virtual_control_error",
    "fig6_tracking_overlay",
    "fig7_lyapunov",
)


def _axes(title, ylabel):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.set_title(title)
    ax.set_xlabel("time (s)")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def make_figures(trace: Sequence[TraceRecord]) -> dict:
    if not trace:
        raise ValueError("empty trace")
    col = {name: np.array([getattr(r, name) for r in trace]) for name in TraceRecord._fields}
    t = col["t"]
    figs = {}

    fig, ax = _axes("Proximal link angle", "theta1 (deg)")
    ax.plot(t, np.degrees(col["x1"]))
    figs["fig3_step_response"] = fig

    fig, ax = _axes("Error in proximal link angle", "e (deg)")
    ax.plot(t, np.degrees(col["e"]))
    figs["fig4_tracking_error"] = fig

    fig, ax = _axes("Error in virtual control", "eta (N m)")
    ax.plot(t, col["eta"])
    figs["fig5_virtual_control_error"] = fig

    fig, ax = _axes("Reference tracking", "theta1 (deg)")
    ax.plot(t, np.degrees(col["x1d"]), "--", label="reference")
    ax.plot(t, np.degrees(col["x1"]), label="actual")
    ax.legend()
    figs["fig6_tracking_overlay"] = fig

    fig, ax = _axes("Lyapunov function", "V")
    v = col["v"]
    if np.any(v > 0):
        ax.semilogy(t[v > 0], v[v > 0])
    else:
        ax.plot(t, v)
    figs["fig7_lyapunov"] = fig
    return figs


def save_figures(trace: Sequence[TraceRecord], out_dir: Path, fmt: str = "png") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, fig in make_figures(trace).items():
        path = out_dir / f"{name}.{fmt}"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths
