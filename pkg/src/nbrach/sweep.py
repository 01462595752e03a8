"""Parameter sweeps over the analytic formulas and the simulator.

A sweep walks one axis (repetition value, harvest rate, availability,
power, threshold, density ratio) and evaluates one or more series per
point, producing a CSV-ready table.  Named presets reproduce the
reference figure axes; a custom sweep walks any configuration key.

Simulation series reuse one seed across rows (common random numbers),
so tables are reproducible byte for byte from (config, seed).  Per-row
runtimes are collected on the table but deliberately never emitted to
CSV, keeping emitted files deterministic.
"""

from __future__ import annotations

import csv
import enum
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

from .config import AppConfig, _FIELD_SPECS, build_config
from .energy import simulate_energy_chain, availability_bounds
from .errors import ConfigError
from .rach import preamble_success_prob, rach_success_prob, repetition_efficiency
from .simulation import simulate_summary

WORKERS_ENV_VAR = "NBRACH_WORKERS"

# event count for availability chain estimates inside sweeps
DES_TRANSITIONS = 1_000_000


class SweepTarget(enum.Enum):
    AVAILABILITY = "availability"
    PREAMBLE_SUCCESS = "preamble"
    RACH_SUCCESS = "rach"
    REPETITION_EFFICIENCY = "efficiency"


class Engine(enum.Enum):
    ANALYTIC = "analytic"
    SIMULATION = "sim"
    BOTH = "both"


@dataclass(frozen=True)
class SweepSpec:
    """Custom single-axis sweep over one configuration key."""

    target: SweepTarget
    engine: Engine
    swept_parameter: str
    values: tuple[float, ...]
    config: AppConfig
    output_path: str | None = None

    def __post_init__(self):
        if self.swept_parameter not in _FIELD_SPECS:
            raise ConfigError(f"swept parameter {self.swept_parameter!r} is not a configuration key")
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ConfigError("sweep values must be strictly monotone")


@dataclass(frozen=True)
class SweepTable:
    """Rows of one sweep; first column is the swept value.  Cells are
    floats, or the string 'error' marking an aborted tail row."""

    columns: tuple[str, ...]
    rows: tuple[tuple[object, ...], ...]
    runtimes: tuple[float, ...] = ()

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ConfigError("every row must match the header width")


@dataclass(frozen=True)
class _Series:
    """One evaluated series: subcolumn names plus the per-point function."""

    names: tuple[str, ...]
    evaluate: Callable[[float], tuple[float, ...]]


@dataclass(frozen=True)
class _Plan:
    axis: str
    values: tuple[float, ...]
    series: tuple[_Series, ...]
    output_path: str | None = None

    @property
    def columns(self) -> tuple[str, ...]:
        names: list[str] = [self.axis]
        for s in self.series:
            names.extend(s.names)
        return tuple(names)


def resolve_workers(explicit: int | None = None) -> int:
    """Worker-pool width: explicit argument, else the environment
    override, else one per CPU."""
    if explicit is not None:
        if explicit < 1:
            raise ConfigError("workers must be at least 1")
        return explicit
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from exc
        if value < 1:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be at least 1")
        return value
    return max(1, os.cpu_count() or 1)


def _run_plan(plan: _Plan, workers: int) -> SweepTable:
    """Evaluate every row, dispatching to a bounded pool; rows are
    assembled in axis order regardless of completion order.  On a row
    failure the completed prefix plus an error-marker row is flushed to
    the plan's output path before the error propagates."""

    def row_for(value: float) -> tuple[tuple[object, ...], float]:
        t0 = time.perf_counter()
        cells: list[object] = [value]
        for s in plan.series:
            cells.extend(s.evaluate(value))
        return tuple(cells), time.perf_counter() - t0

    results: list[tuple[tuple[object, ...], float] | BaseException] = []
    if workers == 1:
        for v in plan.values:
            try:
                results.append(row_for(v))
            except Exception as exc:
                results.append(exc)
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(row_for, v) for v in plan.values]
            for fut in futures:
                try:
                    results.append(fut.result())
                except Exception as exc:
                    results.append(exc)
                    break

    rows: list[tuple[object, ...]] = []
    runtimes: list[float] = []
    for value, res in zip(plan.values, results):
        if isinstance(res, BaseException):
            marker = (value,) + ("error",) * (len(plan.columns) - 1)
            table = SweepTable(columns=plan.columns, rows=tuple(rows) + (marker,),
                               runtimes=tuple(runtimes))
            if plan.output_path:
                emit_csv(table, plan.output_path)
            raise res
        row, secs = res
        rows.append(row)
        runtimes.append(secs)
    table = SweepTable(columns=plan.columns, rows=tuple(rows), runtimes=tuple(runtimes))
    if plan.output_path:
        emit_csv(table, plan.output_path)
    return table


def _format_cell(cell: object) -> str:
    if isinstance(cell, str):
        return cell
    if isinstance(cell, bool):
        return str(cell)
    if isinstance(cell, int):
        return str(cell)
    return format(float(cell), ".12g")


def emit_csv(table: SweepTable, path: str) -> None:
    """UTF-8 CSV, 12 significant digits, '\\n' line endings; identical
    tables re-emit byte-identically."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([_format_cell(c) for c in row])
    except OSError:
        raise


def parse_csv(path: str) -> SweepTable:
    """Inverse of emit_csv up to the emitted 12-digit precision."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = tuple(next(reader))
        except StopIteration as exc:
            raise ConfigError(f"{path}: empty CSV") from exc
        rows = []
        for record in reader:
            cells: list[object] = []
            for cell in record:
                try:
                    cells.append(float(cell))
                except ValueError:
                    cells.append(cell)
            rows.append(tuple(cells))
    return SweepTable(columns=header, rows=tuple(rows))


def _override_text(key: str, value: float) -> str:
    kind, _ = _FIELD_SPECS[key]
    if kind == "int":
        if float(value) != int(value):
            raise ConfigError(f"{key}: sweep value {value} must be an integer")
        return str(int(value))
    return format(float(value), ".17g")


def _analytic_availability(cfg: AppConfig) -> tuple[float, float]:
    lower, upper = availability_bounds(cfg.energy)
    return lower.eta0, upper.eta0


def _make_row_evaluator(build_point: Callable[[float], AppConfig],
                        target: SweepTarget, engine: Engine,
                        label: str) -> list[_Series]:
    """Series whose evaluators rebuild the point config from the swept
    value and run the requested engines."""
    analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
    simulated = engine in (Engine.SIMULATION, Engine.BOTH)
    series: list[_Series] = []

    if target is SweepTarget.AVAILABILITY:
        if analytic:
            def eval_ana(v: float) -> tuple[float, ...]:
                cfg = build_point(v)
                return _analytic_availability(cfg)
            series.append(_Series((f"{label}_lower", f"{label}_upper"), eval_ana))
        if simulated:
            def eval_sim(v: float) -> tuple[float, ...]:
                cfg = build_point(v)
                est = simulate_energy_chain(cfg.energy, DES_TRANSITIONS, cfg.sim.seed)
                return est.eta_hat, est.se
            series.append(_Series((f"{label}_des", f"{label}_des_se"), eval_sim))
        return series

    if analytic:
        def eval_ana(v: float) -> tuple[float, ...]:
            cfg = build_point(v)
            n_t = cfg.energy.n_t
            if target is SweepTarget.PREAMBLE_SUCCESS:
                return (preamble_success_prob(n_t, cfg.channel, cfg.mode, cfg.quadrature),)
            if target is SweepTarget.RACH_SUCCESS:
                return (rach_success_prob(n_t, cfg.channel, cfg.mode, cfg.quadrature),)
            return (repetition_efficiency(n_t, cfg.channel, cfg.mode, cfg.quadrature),)
        series.append(_Series((label,), eval_ana))
    if simulated:
        def eval_sim(v: float) -> tuple[float, ...]:
            cfg = build_point(v)
            n_t = cfg.energy.n_t
            summary = simulate_summary(cfg.channel, n_t, cfg.mode, cfg.sim)
            est = summary.transmission if target is SweepTarget.PREAMBLE_SUCCESS else summary.rach
            scale = float(n_t) if target is SweepTarget.REPETITION_EFFICIENCY else 1.0
            return est.p_hat / scale, est.ci_halfwidth / scale
        series.append(_Series((f"{label}_sim", f"{label}_sim_ci"), eval_sim))
    return series


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """Custom sweep: rebuild the configuration at each swept value of one
    key (derived defaults recompute) and evaluate the target."""

    def build_point(v: float) -> AppConfig:
        raw = dict(spec.config.raw)
        raw[spec.swept_parameter] = _override_text(spec.swept_parameter, v)
        return build_config(raw)

    series = _make_row_evaluator(build_point, spec.target, spec.engine,
                                 spec.target.value)
    plan = _Plan(axis=spec.swept_parameter, values=spec.values,
                 series=tuple(series), output_path=spec.output_path)
    return _run_plan(plan, resolve_workers(workers))


# ---------------------------------------------------------------------------
# presets: one per reference figure, documented by axis and series

PRESET_REPLICATIONS = 1000


def _preset_sim(cfg: AppConfig):
    """Simulation settings for preset rows: a light 1000-replication
    default keeps multi-series presets interactive; an explicit
    `replications` key in the config takes precedence."""
    if "replications" in cfg.raw:
        return cfg.sim
    return replace(cfg.sim, replications=PRESET_REPLICATIONS)


def _rach_series_for(cfg: AppConfig, label: str, engine: Engine, n_t: int,
                     channel_overrides: dict,
                     efficiency: bool = False) -> list[_Series]:
    analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
    simulated = engine in (Engine.SIMULATION, Engine.BOTH)
    series: list[_Series] = []

    def point_channel(ratio: float):
        over = dict(channel_overrides)
        over["lambda_d"] = ratio * cfg.channel.lambda_b
        return replace(cfg.channel, **over)

    scale = float(n_t) if efficiency else 1.0
    if analytic:
        def eval_ana(v: float, _pc=point_channel) -> tuple[float, ...]:
            return (rach_success_prob(n_t, _pc(v), cfg.mode, cfg.quadrature) / scale,)
        series.append(_Series((label,), eval_ana))
    if simulated:
        def eval_sim(v: float, _pc=point_channel) -> tuple[float, ...]:
            est = simulate_summary(_pc(v), n_t, cfg.mode, _preset_sim(cfg)).rach
            return est.p_hat / scale, est.ci_halfwidth / scale
        series.append(_Series((f"{label}_sim", f"{label}_sim_ci"), eval_sim))
    return series


def _preset_fig5(cfg: AppConfig, engine: Engine) -> _Plan:
    """Availability bounds versus repetition value for three capacity
    headrooms; the large-headroom pair shows the flat plateaus."""
    values = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0)
    series: list[_Series] = []
    analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
    simulated = engine in (Engine.SIMULATION, Engine.BOTH)
    for headroom in (0, 10, 160):
        def build(v: float, h=headroom):
            return replace(cfg.energy, n_t=int(v), m0=int(v) + h)
        if analytic:
            def eval_ana(v: float, _b=build) -> tuple[float, ...]:
                lower, upper = availability_bounds(_b(v))
                return lower.eta0, upper.eta0
            series.append(_Series((f"eta0_lower_h{headroom}", f"eta0_upper_h{headroom}"), eval_ana))
        if simulated:
            def eval_sim(v: float, _b=build) -> tuple[float, ...]:
                est = simulate_energy_chain(_b(v), DES_TRANSITIONS, cfg.sim.seed)
                return est.eta_hat, est.se
            series.append(_Series((f"eta0_des_h{headroom}", f"eta0_des_se_h{headroom}"), eval_sim))
    return _Plan(axis="n_t", values=values, series=tuple(series))


def _preset_fig6(cfg: AppConfig, engine: Engine) -> _Plan:
    """Availability bounds versus harvest rate."""
    values = (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5)
    series: list[_Series] = []
    analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
    simulated = engine in (Engine.SIMULATION, Engine.BOTH)

    def build(v: float):
        return replace(cfg.energy, mu0=v)

    if analytic:
        def eval_ana(v: float) -> tuple[float, ...]:
            lower, upper = availability_bounds(build(v))
            return lower.eta0, upper.eta0
        series.append(_Series(("eta0_lower", "eta0_upper"), eval_ana))
    if simulated:
        def eval_sim(v: float) -> tuple[float, ...]:
            est = simulate_energy_chain(build(v), DES_TRANSITIONS, cfg.sim.seed)
            return est.eta_hat, est.se
        series.append(_Series(("eta0_des", "eta0_des_se"), eval_sim))
    return _Plan(axis="mu0", values=values, series=tuple(series))


def _preset_fig7(cfg: AppConfig, engine: Engine) -> _Plan:
    """Random-access success versus energy availability, per repetition
    value; more available energy means more contenders."""
    values = (0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0)
    series: list[_Series] = []
    for n_t in (1, 2, 4, 8):
        analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
        simulated = engine in (Engine.SIMULATION, Engine.BOTH)
        if analytic:
            def eval_ana(v: float, n=n_t) -> tuple[float, ...]:
                chan = replace(cfg.channel, eta0=v)
                return (rach_success_prob(n, chan, cfg.mode, cfg.quadrature),)
            series.append(_Series((f"rach_nt{n_t}",), eval_ana))
        if simulated:
            def eval_sim(v: float, n=n_t) -> tuple[float, ...]:
                chan = replace(cfg.channel, eta0=v)
                est = simulate_summary(chan, n, cfg.mode, _preset_sim(cfg)).rach
                return est.p_hat, est.ci_halfwidth
            series.append(_Series((f"rach_nt{n_t}_sim", f"rach_nt{n_t}_sim_ci"), eval_sim))
    return _Plan(axis="eta0", values=values, series=tuple(series))


def _preset_fig8(cfg: AppConfig, engine: Engine) -> _Plan:
    """Random-access success versus transmit power, per repetition value."""
    values = (0.005, 0.01, 0.02, 0.05, 0.1, 0.2)
    series: list[_Series] = []
    for n_t in (1, 8):
        analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
        simulated = engine in (Engine.SIMULATION, Engine.BOTH)
        if analytic:
            def eval_ana(v: float, n=n_t) -> tuple[float, ...]:
                chan = replace(cfg.channel, p=v)
                return (rach_success_prob(n, chan, cfg.mode, cfg.quadrature),)
            series.append(_Series((f"rach_nt{n_t}",), eval_ana))
        if simulated:
            def eval_sim(v: float, n=n_t) -> tuple[float, ...]:
                chan = replace(cfg.channel, p=v)
                est = simulate_summary(chan, n, cfg.mode, _preset_sim(cfg)).rach
                return est.p_hat, est.ci_halfwidth
            series.append(_Series((f"rach_nt{n_t}_sim", f"rach_nt{n_t}_sim_ci"), eval_sim))
    return _Plan(axis="p", values=values, series=tuple(series))


def _preset_fig9(cfg: AppConfig, engine: Engine) -> _Plan:
    """Random-access success versus SINR threshold in dB."""
    values = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    series: list[_Series] = []
    for n_t in (1, 8):
        analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
        simulated = engine in (Engine.SIMULATION, Engine.BOTH)
        if analytic:
            def eval_ana(v: float, n=n_t) -> tuple[float, ...]:
                chan = replace(cfg.channel, gamma_th=10.0 ** (v / 10.0))
                return (rach_success_prob(n, chan, cfg.mode, cfg.quadrature),)
            series.append(_Series((f"rach_nt{n_t}",), eval_ana))
        if simulated:
            def eval_sim(v: float, n=n_t) -> tuple[float, ...]:
                chan = replace(cfg.channel, gamma_th=10.0 ** (v / 10.0))
                est = simulate_summary(chan, n, cfg.mode, _preset_sim(cfg)).rach
                return est.p_hat, est.ci_halfwidth
            series.append(_Series((f"rach_nt{n_t}_sim", f"rach_nt{n_t}_sim_ci"), eval_sim))
    return _Plan(axis="gamma_db", values=values, series=tuple(series))


_RATIO_VALUES = (100.0, 316.0, 1000.0, 3162.0, 10000.0)


def _preset_fig10(cfg: AppConfig, engine: Engine) -> _Plan:
    """Random-access success versus device-to-station density ratio, per
    repetition value."""
    series: list[_Series] = []
    for n_t in (1, 2, 4, 8):
        series.extend(_rach_series_for(cfg, f"rach_nt{n_t}", engine, n_t, {}))
    return _Plan(axis="density_ratio", values=_RATIO_VALUES, series=tuple(series))


def _preset_fig11(cfg: AppConfig, engine: Engine) -> _Plan:
    """Light versus heavy traffic load over the density ratio axis."""
    series: list[_Series] = []
    for a_a, tag in ((0.001, "light"), (0.015, "heavy")):
        for n_t in (1, 8):
            series.extend(_rach_series_for(cfg, f"rach_{tag}_nt{n_t}", engine, n_t,
                                           {"a_a": a_a}))
    return _Plan(axis="density_ratio", values=_RATIO_VALUES, series=tuple(series))


def _preset_fig12(cfg: AppConfig, engine: Engine) -> _Plan:
    """Threshold series over the density ratio axis."""
    series: list[_Series] = []
    for gamma_db in (10.0, 20.0, 30.0):
        series.extend(_rach_series_for(cfg, f"rach_g{int(gamma_db)}db", engine, 1,
                                       {"gamma_th": 10.0 ** (gamma_db / 10.0)}))
    return _Plan(axis="density_ratio", values=_RATIO_VALUES, series=tuple(series))


def _preset_fig13(cfg: AppConfig, engine: Engine) -> _Plan:
    """Repetition efficiency versus repetition value for density-ratio and
    threshold series; efficiency strictly falls along the axis."""
    values = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
    series: list[_Series] = []
    analytic = engine in (Engine.ANALYTIC, Engine.BOTH)
    simulated = engine in (Engine.SIMULATION, Engine.BOTH)
    for ratio, gamma_db, tag in ((1000.0, 20.0, "r1e3_g20"),
                                 (10000.0, 20.0, "r1e4_g20"),
                                 (1000.0, 10.0, "r1e3_g10")):
        def chan_for(ratio=ratio, gamma_db=gamma_db):
            return replace(cfg.channel,
                           lambda_d=ratio * cfg.channel.lambda_b,
                           gamma_th=10.0 ** (gamma_db / 10.0))
        if analytic:
            def eval_ana(v: float, _cf=chan_for) -> tuple[float, ...]:
                return (repetition_efficiency(int(v), _cf(), cfg.mode, cfg.quadrature),)
            series.append(_Series((f"zeta_{tag}",), eval_ana))
        if simulated:
            def eval_sim(v: float, _cf=chan_for) -> tuple[float, ...]:
                est = simulate_summary(_cf(), int(v), cfg.mode, _preset_sim(cfg)).rach
                return est.p_hat / v, est.ci_halfwidth / v
            series.append(_Series((f"zeta_{tag}_sim", f"zeta_{tag}_sim_ci"), eval_sim))
    return _Plan(axis="n_t", values=values, series=tuple(series))


PRESETS: dict[str, Callable[[AppConfig, Engine], _Plan]] = {
    "fig5": _preset_fig5,
    "fig6": _preset_fig6,
    "fig7": _preset_fig7,
    "fig8": _preset_fig8,
    "fig9": _preset_fig9,
    "fig10": _preset_fig10,
    "fig11": _preset_fig11,
    "fig12": _preset_fig12,
    "fig13": _preset_fig13,
}


def run_preset(name: str, cfg: AppConfig, engine: Engine,
               output_path: str | None = None,
               workers: int | None = None) -> SweepTable:
    """Run one named preset; 'custom' sweeps are built through SweepSpec."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)} or 'custom'")
    plan = PRESETS[name](cfg, engine)
    plan = replace(plan, output_path=output_path)
    return _run_plan(plan, resolve_workers(workers))


def run_custom(cfg: AppConfig, engine: Engine, output_path: str | None = None,
               workers: int | None = None) -> SweepTable:
    """Build a SweepSpec from the config's sweep_key/sweep_values/target
    selections and run it."""
    if not cfg.sweep_key or not cfg.sweep_values or not cfg.target:
        raise ConfigError("custom sweep requires sweep_key, sweep_values and target in the config")
    spec = SweepSpec(
        target=SweepTarget(cfg.target),
        engine=engine,
        swept_parameter=cfg.sweep_key,
        values=tuple(cfg.sweep_values),
        config=cfg,
        output_path=output_path,
    )
    return run_sweep(spec, workers)
