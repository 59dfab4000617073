"""Command-line front end.

Exit codes: 0 success, 2 bad config or input trace, 3 simulation diverged,
4 file-system failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .analysis import step_metrics, tracking_metrics
from .config import ConfigError, dump_config, parse_config, with_override
from .simulator import SimConfig, SimulationDiverged, run
from .traceio import TraceFormatError, format_metrics, read_trace, write_trace

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


@dataclass(frozen=True)
class RunManifest:
    config_path: Path | None
    out_dir: Path
    emit_plots: bool = False
    overwrite: bool = False
    seedless: bool = True  # nothing here is random


def _err(msg: str) -> None:
    print(f"tendonfinger: {msg}", file=sys.stderr)


def load_config(path: Path | None) -> SimConfig:
    return parse_config("" if path is None else Path(path).read_text())


def _simulate_into(cfg: SimConfig, out_dir: Path, overwrite: bool, emit_plots: bool) -> int:
    try:
        trace = run(cfg)
    except SimulationDiverged as exc:
        _err(str(exc))
        return EXIT_DIVERGED
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_trace(out_dir / "trace.csv", trace, overwrite=overwrite)
        (out_dir / "config.resolved").write_text(dump_config(cfg))
        if emit_plots:
            from .plots import save_figures

            save_figures(trace, out_dir)
    except OSError as exc:
        _err(f"cannot write to {out_dir}: {exc}")
        return EXIT_IO
    return EXIT_OK


def cmd_simulate(manifest: RunManifest) -> int:
    try:
        cfg = load_config(manifest.config_path)
    except OSError as exc:
        _err(f"cannot read config {manifest.config_path}: {exc}")
        return EXIT_INPUT
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_INPUT
    return _simulate_into(cfg, Path(manifest.out_dir), manifest.overwrite, manifest.emit_plots)


def _load_trace(path: Path):
    try:
        return read_trace(path)
    except OSError as exc:
        _err(f"cannot read trace {path}: {exc}")
    except (TraceFormatError, UnicodeDecodeError) as exc:
        _err(f"{path}: {exc}")
    return None


def cmd_metrics(trace_path: Path, kind: str, out_dir: Path | None = None,
                band: float = 0.02, window: float = 1.0) -> int:
    trace_path = Path(trace_path)
    trace = _load_trace(trace_path)
    if trace is None:
        return EXIT_INPUT
    try:
        if kind == "step":
            metrics = step_metrics(trace, trace[-1].x1d, band)
        else:
            metrics = tracking_metrics(trace, window)
    except ValueError as exc:
        _err(f"{trace_path}: {exc}")
        return EXIT_INPUT
    report = format_metrics(metrics)
    out_dir = trace_path.parent if out_dir is None else Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "metrics.txt").write_text(report)
    except OSError as exc:
        _err(f"cannot write to {out_dir}: {exc}")
        return EXIT_IO
    sys.stdout.write(report)
    return EXIT_OK


def cmd_plot(trace_path: Path, out_dir: Path | None = None) -> int:
    trace_path = Path(trace_path)
    trace = _load_trace(trace_path)
    if trace is None:
        return EXIT_INPUT
    if not trace:
        _err(f"{trace_path}: trace has no records")
        return EXIT_INPUT
    from .plots import save_figures

    out_dir = trace_path.parent if out_dir is None else Path(out_dir)
    try:
        for p in save_figures(trace, out_dir):
            print(p)
    except OSError as exc:
        _err(f"cannot write to {out_dir}: {exc}")
        return EXIT_IO
    return EXIT_OK


def _sweep_one(args):
    cfg, out_dir, overwrite = args
    return _simulate_into(cfg, out_dir, overwrite, False)


def cmd_sweep(config_path: Path | None, param: str, values: list[str], out_dir: Path,
              overwrite: bool = False, jobs: int = 1) -> int:
    try:
        base = load_config(config_path)
        cfgs = [with_override(base, param, v) for v in values]
    except OSError as exc:
        _err(f"cannot read config {config_path}: {exc}")
        return EXIT_INPUT
    except ConfigError as exc:
        _err(f"config error: {exc}")
        return EXIT_INPUT
    tasks = [(c, Path(out_dir) / f"{param}={v}", overwrite) for c, v in zip(cfgs, values)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(_sweep_one, tasks))
    else:
        codes = [_sweep_one(t) for t in tasks]
    for (_, d, _), code in zip(tasks, codes):
        print(f"{d}: exit {code}")
    return max(codes, default=EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tendonfinger", description="Tendon-driven finger backstepping simulator")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run a closed-loop simulation and write trace.csv")
    sp.add_argument("--config", type=Path)
    sp.add_argument("--out", type=Path, default=Path("out"))
    sp.add_argument("--overwrite", action="store_true")
    sp.add_argument("--plots", action="store_true", help="also write the figures")

    mp = sub.add_parser("metrics", help="step or tracking metrics from a trace")
    mp.add_argument("trace", type=Path)
    mp.add_argument("--kind", choices=("step", "tracking"), default="step")
    mp.add_argument("--out", type=Path)
    mp.add_argument("--band", type=float, default=0.02)
    mp.add_argument("--window", type=float, default=1.0, help="tracking transient exclusion (s)")

    pp = sub.add_parser("plot", help="render figures from a trace")
    pp.add_argument("trace", type=Path)
    pp.add_argument("--out", type=Path)

    wp = sub.add_parser("sweep", help="run one simulation per value of a config key")
    wp.add_argument("--config", type=Path)
    wp.add_argument("--param", required=True, help="section.key to vary")
    wp.add_argument("--values", required=True, help="comma-separated values")
    wp.add_argument("--out", type=Path, default=Path("sweep"))
    wp.add_argument("--overwrite", action="store_true")
    wp.add_argument("--jobs", type=int, default=1)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(RunManifest(args.config, args.out, args.plots, args.overwrite))
    if args.command == "metrics":
        return cmd_metrics(args.trace, args.kind, args.out, args.band, args.window)
    if args.command == "plot":
        return cmd_plot(args.trace, args.out)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    return cmd_sweep(args.config, args.param, values, args.out, args.overwrite, args.jobs)


def entry() -> None:
    sys.exit(main())
