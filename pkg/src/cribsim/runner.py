"""Execute configured runs and sweeps, writing plot-ready flat files.

``simulate_run`` integrates one full protocol and writes the transmitted
and echo envelopes as CSV plus a JSON metric report.  ``sweep_run``
evaluates a metric over a 1-D or 2-D parameter grid: fast mode uses the
closed forms only; verify mode also integrates every grid point and adds
a numeric column plus the analytic-numeric residual.  Both modes compute
the analytic column through the same code path, so fast and verify agree
on it bit for bit.

Sweep points are independent; verify mode runs them on a bounded thread
pool (numpy releases the GIL in the inner kernels).  Rows are emitted in
grid order regardless of completion order.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import analytic
from .config import RunConfig, write_config
from .dynamics import recall_params, run_protocol
from .errors import ConfigError
from .medium import TRANSVERSE
from .metrics import analyze, measure_efficiency
from .qubit import FieldRecord, TimeBinQubit

__all__ = [
    "SimulateArtifacts",
    "SweepArtifacts",
    "simulate_run",
    "sweep_run",
    "analytic_metric",
    "default_threads",
]


@dataclass(frozen=True)
class SimulateArtifacts:
    out_dir: Path
    files: dict[str, Path]
    metrics: dict


@dataclass(frozen=True)
class SweepArtifacts:
    out_dir: Path
    files: dict[str, Path]
    rows: int
    max_rel_residual: float | None


def default_threads() -> int:
    return min(4, os.cpu_count() or 1)


def _normalized_amplitudes(config: RunConfig) -> tuple[float, float]:
    alpha, beta = config.qubit.alpha, config.qubit.beta
    norm = math.hypot(alpha, beta)
    if norm == 0:
        raise ConfigError("qubit amplitudes alpha and beta are both zero")
    return alpha / norm, beta / norm


def _loose_qubit(config: RunConfig) -> TimeBinQubit:
    """Qubit descriptor for closed forms only (no envelope validation)."""
    alpha, beta = _normalized_amplitudes(config)
    return TimeBinQubit(
        alpha=alpha,
        beta=beta,
        phi=config.qubit.phi,
        tau_o=config.qubit.tau_o,
        omega_eg_tau_o=config.qubit.omega_eg_tau_o,
    )


def analytic_metric(config: RunConfig, metric: str) -> float:
    """Closed-form value of ``metric`` for one configured parameter point."""
    medium = config.medium.build()
    schedule = config.schedule.build()
    params = recall_params(medium, schedule, _loose_qubit(config))
    alpha, beta = _normalized_amplitudes(config)
    if metric == "efficiency":
        if medium.kind == TRANSVERSE:
            return analytic.efficiency_transverse(params, alpha, beta)
        return analytic.efficiency_longitudinal(params, alpha, beta)
    if metric == "gain":
        if medium.kind == TRANSVERSE:
            return analytic.gain_transverse(params, alpha, beta)
        return analytic.gain_longitudinal(params, alpha, beta)
    if metric == "phase_diff":
        return analytic.phase_diff_01(params)
    raise ConfigError(f"unknown metric {metric!r}")


def _numeric_metric(config: RunConfig, metric: str) -> float:
    qubit = config.qubit.build()
    medium = config.medium.build()
    schedule = config.schedule.build()
    result = run_protocol(qubit, medium, schedule)
    efficiency = measure_efficiency(result)
    if metric == "efficiency":
        return efficiency
    if metric == "gain":
        return efficiency * schedule.eta
    raise ConfigError(f"metric {metric!r} has no numeric (verify-mode) form")


def _write_envelope_csv(path: Path, record: FieldRecord) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# t, re_a, im_a, intensity\n")
        # tolist() yields plain Python scalars, so repr round-trips at full
        # precision without the numpy type tag
        for t, a in zip(record.t.tolist(), record.a.tolist()):
            handle.write(
                f"{t!r}, {a.real!r}, {a.imag!r}, {(a.real**2 + a.imag**2)!r}\n"
            )


def simulate_run(config: RunConfig, out_dir=None) -> SimulateArtifacts:
    """Run one protocol and write envelope CSVs + metric report."""
    qubit = config.qubit.build()
    medium = config.medium.build()
    schedule = config.schedule.build()
    result = run_protocol(qubit, medium, schedule)
    report = analyze(result, qubit, recall_params(medium, schedule, qubit))

    target = Path(out_dir) if out_dir is not None else Path(config.output.path)
    target.mkdir(parents=True, exist_ok=True)
    files: dict[str, Path] = {}

    for name, record in (("transmitted", result.transmitted), ("echo", result.echo)):
        path = target / f"{name}.csv"
        _write_envelope_csv(path, record)
        files[name] = path

    metrics = report.as_dict()
    metrics_path = target / "metrics.json"
    with open(metrics_path, "w", encoding="utf-8") as handle:
        json.dump(metrics, handle, indent=2, sort_keys=True)
        handle.write("\n")
    files["metrics"] = metrics_path

    config_path = target / "run.cfg"
    config_path.write_text(write_config(config), encoding="utf-8")
    files["config"] = config_path

    return SimulateArtifacts(out_dir=target, files=files, metrics=metrics)


def _sweep_points(config: RunConfig) -> tuple[list[tuple[float, float | None]], bool]:
    sweep = config.sweep
    values1 = sweep.axis1.values()
    if sweep.axis2 is None:
        return [(float(v), None) for v in values1], False
    values2 = sweep.axis2.values()
    return [(float(u), float(v)) for u in values1 for v in values2], True


def _point_config(config: RunConfig, point: tuple[float, float | None]) -> RunConfig:
    sweep = config.sweep
    cfg = config.with_parameter(sweep.axis1.name, point[0])
    if sweep.axis2 is not None:
        cfg = cfg.with_parameter(sweep.axis2.name, point[1])
    return cfg


def sweep_run(
    config: RunConfig,
    mode: str = "fast",
    threads: int | None = None,
    out_dir=None,
) -> SweepArtifacts:
    """Evaluate the configured sweep and write ``sweep.csv``."""
    if config.sweep is None:
        raise ConfigError("configuration has no [sweep] section")
    if mode not in ("fast", "verify"):
        raise ConfigError(f"mode must be fast or verify, got {mode!r}")
    metric = config.sweep.metric
    if mode == "verify" and metric == "phase_diff":
        raise ConfigError("metric phase_diff sweeps run in fast mode only")

    points, two_axes = _sweep_points(config)
    point_configs = [_point_config(config, p) for p in points]
    analytic_col = [analytic_metric(c, metric) for c in point_configs]

    numeric_col: list[float] | None = None
    if mode == "verify":
        workers = threads if threads and threads > 0 else default_threads()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            numeric_col = list(
                pool.map(lambda c: _numeric_metric(c, metric), point_configs)
            )

    target = Path(out_dir) if out_dir is not None else Path(config.output.path)
    target.mkdir(parents=True, exist_ok=True)
    path = target / "sweep.csv"

    names = [config.sweep.axis1.name]
    if two_axes:
        names.append(config.sweep.axis2.name)
    header = names + [f"{metric}_analytic"]
    if numeric_col is not None:
        header += [f"{metric}_numeric", "residual"]

    max_rel = None
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# " + ", ".join(header) + "\n")
        for i, point in enumerate(points):
            row = [point[0]] + ([point[1]] if two_axes else [])
            row.append(analytic_col[i])
            if numeric_col is not None:
                residual = numeric_col[i] - analytic_col[i]
                row += [numeric_col[i], residual]
                rel = abs(residual) / max(abs(analytic_col[i]), 1e-30)
                max_rel = rel if max_rel is None else max(max_rel, rel)
            handle.write(", ".join(repr(float(v)) for v in row) + "\n")

    files = {"sweep": path}
    config_path = target / "sweep.cfg"
    config_path.write_text(write_config(config), encoding="utf-8")
    files["config"] = config_path

    return SweepArtifacts(
        out_dir=target, files=files, rows=len(points), max_rel_residual=max_rel
    )
