"""Flat ``section.key = value`` run configuration.

Sections: ``finger``, ``actuator``, ``controller``, ``traj`` (alias
``trajectory``) and ``sim``.  Missing keys take their defaults; an empty file
is the 60 degree step experiment.  Angles may be given in degrees through the
``*_deg`` variants.  ``#`` starts a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import fields

from .controller import ControllerGains
from .dynamics import ActuatorParams, FingerParams
from .simulator import SimConfig
from .trajectory import TrajectorySpec


class ConfigError(ValueError):
    pass


_FINGER = [f.name for f in fields(FingerParams)]
_ACTUATOR = [f.name for f in fields(ActuatorParams)]
_GAINS = [f.name for f in fields(ControllerGains)]
_TRAJ = ["kind", "amplitude", "amplitude_deg", "coeffs", "theta_start", "theta_start_deg",
         "theta_end", "theta_end_deg", "duration", "hold_after", "t_final"]
_SIM = ["dt", "t_end", "x0", "substeps", "controller_mode", "voltage_limit"]

_SECTIONS = {
    "finger": _FINGER,
    "actuator": _ACTUATOR + ["m_slider"],
    "controller": _GAINS,
    "traj": _TRAJ,
    "sim": _SIM,
}
_ALIASES = {"trajectory": "traj"}

_LINE = re.compile(r"^\s*([A-Za-z_]\w*)\.([A-Za-z_]\w*)\s*=\s*(.*?)\s*$")


def _float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def _optional_float(key: str, raw: str) -> float | None:
    return None if raw.lower() == "none" else _float(key, raw)


def _floats(key: str, raw: str, n: int) -> tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != n:
        raise ConfigError(f"{key}: expected {n} comma-separated numbers, got {raw!r}")
    return tuple(_float(key, p) for p in parts)


def _bool(key: str, raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected true/false, got {raw!r}")


def read_pairs(text: str) -> dict[str, str]:
    """Return ``{"section.key": raw_value}``; rejects malformed, unknown or repeated keys."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        m = _LINE.match(body)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {line.strip()!r}")
        section, key, raw = m.groups()
        section = _ALIASES.get(section, section)
        if section not in _SECTIONS:
            raise ConfigError(f"line {lineno}: unknown section {section!r}")
        if key not in _SECTIONS[section]:
            raise ConfigError(f"line {lineno}: unknown key {section}.{key}")
        if key == "m_slider":
            key = "ms"
        name = f"{section}.{key}"
        if name in out:
            raise ConfigError(f"line {lineno}: duplicate key {name}")
        if raw == "":
            raise ConfigError(f"line {lineno}: missing value for {name}")
        out[name] = raw
    return out


def _build(section: str, cls, kwargs):
    try:
        return cls(**kwargs)
    except ValueError as exc:
        msg = str(exc)
        head = msg.split(" ", 1)[0]
        prefix = f"{section}.{head}" if head.isidentifier() else section
        raise ConfigError(f"invalid {prefix}: {msg}") from None


def _angle(pairs: dict[str, str], name: str, default: float) -> float:
    rad, deg = pairs.get(f"traj.{name}"), pairs.get(f"traj.{name}_deg")
    if rad is not None and deg is not None:
        raise ConfigError(f"traj.{name} and traj.{name}_deg are mutually exclusive")
    if deg is not None:
        return math.radians(_float(f"traj.{name}_deg", deg))
    if rad is not None:
        return _float(f"traj.{name}", rad)
    return default


def parse_config(text: str) -> SimConfig:
    pairs = read_pairs(text)

    def section(name: str, keys):
        return {k: _float(f"{name}.{k}", pairs[f"{name}.{k}"]) for k in keys if f"{name}.{k}" in pairs}

    fp = _build("finger", FingerParams, section("finger", _FINGER))
    ap = _build("actuator", ActuatorParams, section("actuator", _ACTUATOR))
    gains = _build("controller", ControllerGains, section("controller", _GAINS))

    base = TrajectorySpec()
    tkw: dict = {"amplitude": _angle(pairs, "amplitude", base.amplitude)}
    if "traj.kind" in pairs:
        tkw["kind"] = pairs["traj.kind"]
    if "traj.coeffs" in pairs:
        tkw["coeffs"] = _floats("traj.coeffs", pairs["traj.coeffs"], 4)
    if "traj.hold_after" in pairs:
        tkw["hold_after"] = _bool("traj.hold_after", pairs["traj.hold_after"])
    if "traj.t_final" in pairs:
        tkw["t_final"] = _optional_float("traj.t_final", pairs["traj.t_final"])
    start = _angle(pairs, "theta_start", base.boundary[0])
    end = _angle(pairs, "theta_end", base.boundary[1])
    duration = _float("traj.duration", pairs["traj.duration"]) if "traj.duration" in pairs else base.boundary[2]
    tkw["boundary"] = (start, end, duration)
    traj = _build("traj", TrajectorySpec, tkw)

    skw: dict = {}
    for k in ("dt", "t_end"):
        if f"sim.{k}" in pairs:
            skw[k] = _float(f"sim.{k}", pairs[f"sim.{k}"])
    if "sim.x0" in pairs:
        skw["x0"] = _floats("sim.x0", pairs["sim.x0"], 3)
    if "sim.substeps" in pairs:
        raw = pairs["sim.substeps"]
        if not raw.isdigit():
            raise ConfigError(f"sim.substeps: expected a positive integer, got {raw!r}")
        skw["substeps"] = int(raw)
    if "sim.controller_mode" in pairs:
        skw["controller_mode"] = pairs["sim.controller_mode"]
    if "sim.voltage_limit" in pairs:
        skw["voltage_limit"] = _optional_float("sim.voltage_limit", pairs["sim.voltage_limit"])
    return _build("sim", SimConfig, dict(skw, fp=fp, ap=ap, gains=gains, traj=traj))


def dump_config(cfg: SimConfig) -> str:
    """Canonical text form; ``parse_config(dump_config(c)) == c``."""
    lines = [f"finger.{k} = {getattr(cfg.fp, k)!r}" for k in _FINGER]
    lines += [f"actuator.{k} = {getattr(cfg.ap, k)!r}" for k in _ACTUATOR]
    lines += [f"controller.{k} = {getattr(cfg.gains, k)!r}" for k in _GAINS]
    tr = cfg.traj
    lines += [
        f"traj.kind = {tr.kind}",
        f"traj.amplitude = {tr.amplitude!r}",
        "traj.coeffs = " + ", ".join(repr(c) for c in tr.coeffs),
        f"traj.theta_start = {tr.boundary[0]!r}",
        f"traj.theta_end = {tr.boundary[1]!r}",
        f"traj.duration = {tr.boundary[2]!r}",
        f"traj.hold_after = {'true' if tr.hold_after else 'false'}",
        f"traj.t_final = {tr.t_final!r}".replace("None", "none"),
        f"sim.dt = {cfg.dt!r}",
        f"sim.t_end = {cfg.t_end!r}",
        "sim.x0 = " + ", ".join(repr(v) for v in cfg.x0),
        f"sim.substeps = {cfg.substeps}",
        f"sim.controller_mode = {cfg.controller_mode}",
        f"sim.voltage_limit = {cfg.voltage_limit!r}".replace("None", "none"),
    ]
    return "\n".join(lines) + "\n"


def with_override(cfg: SimConfig, key: str, raw: str) -> SimConfig:
    """Re-parse ``cfg`` with one ``section.key`` replaced."""
    pairs = read_pairs(dump_config(cfg))
    (name, value), = read_pairs(f"{key} = {raw}").items()
    if name.endswith("_deg"):
        pairs.pop(name[: -len("_deg")], None)
    pairs[name] = value
    return parse_config("\n".join(f"{k} = {v}" for k, v in pairs.items()))

