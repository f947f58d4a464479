"""Config-driven experiment runner.

An experiment file (JSON, conventionally ``*.cfg``) declares a model, a
target option, the hedge methods to compare, the strike bands available
per short maturity, and exactly one sweep variable.  ``run_experiment``
produces one report row per sweep value with the inception error of every
method (plus the loss-reduction percentage when both one- and
two-maturity quadrature hedges are present), and, when a simulation block
is given, cross-path hedge-error statistics at the requested checkpoint
times.  Reports are deterministic given the config: re-running byte-
reproduces every emitted file regardless of the thread count.

Config schema::

    {
      "model":   {"type": "bs"|"mjd", "r": .., "delta_yield": .., "sigma": ..,
                  "mu": .., ["lam": .., "mu_j": .., "sigma_j": ..]},
      "target":  {"strike": .., "maturity": .., "spot": ..},
      "methods": [{"name": "CW_a"|"CW_b"|"GQ1"|"GQ2"|"GQn"|"DH", ["n": ..]}, ...],
      "bands":   [{"maturity": .., "lo": .., "hi": ..}, ...],   # descending maturity
      "sweep":   {"variable": "quad_points"|"band"|"u1"|"u2"|"lambda"|"mu_j"|"sigma_j",
                  "values": [..], ["hold_variance": ..]},
      ["modified_weight": {"n_inner_gq": 5, "n_laguerre": 20}],
      ["simulation": {"n_paths": .., "seed": .., "step": .., "horizon": ..,
                      ["checkpoints": [..]]}]
    }

``hold_variance`` recomputes the diffusion vol while sweeping a jump
parameter so the total annualized return variance stays fixed.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, UndefinedPdlError
from .models import BsParams, MjdParams, OptionRef
from .simulation import (
    SimConfig,
    delta_hedge_run,
    simulate_paths,
    static_hedge_run,
    summarize,
)
from .spanning import (
    MATURITY_GAP,
    ModifiedWeightConfig,
    StrikeBand,
    build_cw_a,
    build_cw_b,
    build_gq1,
    build_gq2,
    build_gq_n,
)

__all__ = [
    "ExperimentConfig",
    "MethodSpec",
    "SweepSpec",
    "SimulationSettings",
    "Report",
    "ReportRow",
    "load_config",
    "parse_config",
    "run_experiment",
    "emit",
]

METHOD_NAMES = ("CW_a", "CW_b", "GQ1", "GQ2", "GQn", "DH")
_ORDERED_METHODS = ("CW_b", "GQ1", "GQ2", "GQn")
SWEEP_VARIABLES = ("quad_points", "band", "u1", "u2", "lambda", "mu_j", "sigma_j")
_JUMP_FIELDS = {"lambda": "lam", "mu_j": "mu_j", "sigma_j": "sigma_j"}


@dataclass(frozen=True)
class MethodSpec:
    name: str
    n: int | None = None


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    hold_variance: float | None = None


@dataclass(frozen=True)
class SimulationSettings:
    n_paths: int
    seed: int
    step: float
    horizon: float
    checkpoints: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    model: BsParams | MjdParams
    target: OptionRef
    spot: float
    methods: tuple[MethodSpec, ...]
    bands: tuple[StrikeBand, ...]
    sweep: SweepSpec
    modified_weight: ModifiedWeightConfig
    simulation: SimulationSettings | None
    raw: dict


def _get(section: dict, path: str, key: str, kind, required=True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"{path}.{key}: missing required field")
        return default
    value = section[key]
    try:
        if kind is float:
            out = float(value)
            if not math.isfinite(out):
                raise ValueError
            return out
        if kind is int:
            if isinstance(value, bool) or int(value) != value:
                raise ValueError
            return int(value)
        return value
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.{key}: expected {kind.__name__}, got {value!r}") from None


def _parse_model(section, path="model"):
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _get(section, path, "type", str)
    common = dict(
        r=_get(section, path, "r", float),
        delta_yield=_get(section, path, "delta_yield", float),
        sigma=_get(section, path, "sigma", float),
        mu=_get(section, path, "mu", float, required=False, default=0.0),
    )
    try:
        if kind == "bs":
            return BsParams(**common)
        if kind == "mjd":
            return MjdParams(
                lam=_get(section, path, "lam", float),
                mu_j=_get(section, path, "mu_j", float),
                sigma_j=_get(section, path, "sigma_j", float),
                **common,
            )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.type: expected 'bs' or 'mjd', got {kind!r}")


def _parse_band(section, path):
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    try:
        return StrikeBand(
            maturity=_get(section, path, "maturity", float),
            lo=_get(section, path, "lo", float),
            hi=_get(section, path, "hi", float),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _check_band_order(bands, target, path="bands"):
    for i, band in enumerate(bands):
        if band.maturity >= target.maturity:
            raise ConfigError(
                f"{path}[{i}].maturity: must precede target maturity {target.maturity}"
            )
    for i in range(1, len(bands)):
        if bands[i].maturity >= bands[i - 1].maturity:
            raise ConfigError(f"{path}[{i}].maturity: maturities must strictly decrease")


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a config dict; raises ``ConfigError`` naming the bad field."""
    if not isinstance(data, dict):
        raise ConfigError("config root: expected an object")
    model = _parse_model(data.get("model", {}))
    tsec = data.get("target", {})
    try:
        target = OptionRef(
            strike=_get(tsec, "target", "strike", float),
            maturity=_get(tsec, "target", "maturity", float),
            kind=_get(tsec, "target", "kind", str, required=False, default="call"),
        )
    except ValueError as exc:
        raise ConfigError(f"target: {exc}") from exc
    spot = _get(tsec, "target", "spot", float)
    if spot <= 0:
        raise ConfigError("target.spot: must be > 0")

    raw_methods = data.get("methods")
    if not isinstance(raw_methods, list) or not raw_methods:
        raise ConfigError("methods: must be a non-empty list")
    methods = []
    for i, msec in enumerate(raw_methods):
        name = _get(msec, f"methods[{i}]", "name", str)
        if name not in METHOD_NAMES:
            raise ConfigError(f"methods[{i}].name: unknown method {name!r}")
        n = _get(msec, f"methods[{i}]", "n", int, required=False)
        if n is not None and n < 1:
            raise ConfigError(f"methods[{i}].n: must be >= 1")
        methods.append(MethodSpec(name, n))
    if len({m.name for m in methods}) != len(methods):
        raise ConfigError("methods: duplicate method names")

    raw_bands = data.get("bands", [])
    if not isinstance(raw_bands, list):
        raise ConfigError("bands: expected a list")
    bands = tuple(_parse_band(b, f"bands[{i}]") for i, b in enumerate(raw_bands))
    _check_band_order(bands, target)

    ssec = data.get("sweep")
    if not isinstance(ssec, dict):
        raise ConfigError("sweep: missing required block")
    variable = _get(ssec, "sweep", "variable", str)
    if variable not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep.variable: unknown variable {variable!r}")
    values = ssec.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values: must be a non-empty list")
    hold_variance = _get(ssec, "sweep", "hold_variance", float, required=False)
    if hold_variance is not None and variable not in _JUMP_FIELDS:
        raise ConfigError("sweep.hold_variance: only valid for jump-parameter sweeps")
    sweep = SweepSpec(variable, tuple(values), hold_variance)
    if variable in _JUMP_FIELDS and not isinstance(model, MjdParams):
        raise ConfigError(f"sweep.variable: {variable!r} requires a jump-diffusion model")
    if variable == "u2" and len(bands) < 2:
        raise ConfigError("sweep.variable: 'u2' requires at least two bands")
    if variable == "u1" and not bands:
        raise ConfigError("sweep.variable: 'u1' requires at least one band")

    mwsec = data.get("modified_weight", {})
    try:
        mw_cfg = ModifiedWeightConfig(
            n_inner_gq=_get(mwsec, "modified_weight", "n_inner_gq", int,
                            required=False, default=5),
            n_laguerre=_get(mwsec, "modified_weight", "n_laguerre", int,
                            required=False, default=20),
        )
    except ValueError as exc:
        raise ConfigError(f"modified_weight: {exc}") from exc

    sim = None
    if "simulation" in data:
        sisec = data["simulation"]
        horizon = _get(sisec, "simulation", "horizon", float)
        checkpoints = sisec.get("checkpoints", [horizon])
        if not isinstance(checkpoints, list) or not checkpoints:
            raise ConfigError("simulation.checkpoints: must be a non-empty list")
        sim = SimulationSettings(
            n_paths=_get(sisec, "simulation", "n_paths", int),
            seed=_get(sisec, "simulation", "seed", int),
            step=_get(sisec, "simulation", "step", float),
            horizon=horizon,
            checkpoints=tuple(float(c) for c in checkpoints),
        )
        if any(c > horizon + 1e-12 or c <= 0 for c in sim.checkpoints):
            raise ConfigError("simulation.checkpoints: must lie in (0, horizon]")
        for c in sim.checkpoints:
            if abs(round(c / sim.step) * sim.step - c) > 1e-9:
                raise ConfigError(
                    f"simulation.checkpoints: {c!r} is not on the step grid"
                )

    needs_bands = {"CW_a", "CW_b", "GQ1", "GQ2", "GQn"}
    for i, m in enumerate(methods):
        if m.name in needs_bands and not bands:
            raise ConfigError(f"methods[{i}]: {m.name} requires at least one band")
        if m.name == "GQ2" and len(bands) < 2:
            raise ConfigError(f"methods[{i}]: GQ2 requires two bands")
        if m.name in _ORDERED_METHODS and m.n is None and variable != "quad_points":
            raise ConfigError(f"methods[{i}].n: required unless sweeping quad_points")
        if m.name == "DH" and sim is None:
            raise ConfigError(f"methods[{i}]: DH requires a simulation block")
    return ExperimentConfig(
        model, target, spot, tuple(methods), bands, sweep, mw_cfg, sim, data
    )


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON experiment file."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from exc
    return parse_config(data)


@dataclass
class ReportRow:
    sweep_value: object
    methods: dict
    pdl: float | None

    def to_dict(self):
        return {"sweep_value": self.sweep_value, "methods": self.methods, "pdl": self.pdl}


@dataclass
class Report:
    variable: str
    rows: list
    metadata: dict

    def to_dict(self):
        return {
            "variable": self.variable,
            "rows": [row.to_dict() for row in self.rows],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        rows = [ReportRow(r["sweep_value"], r["methods"], r["pdl"]) for r in data["rows"]]
        return cls(data["variable"], rows, data["metadata"])


def _value_context(cfg: ExperimentConfig, value):
    """Resolve (model, bands, per-method orders) for one sweep value."""
    model = cfg.model
    bands = list(cfg.bands)
    orders = {m.name: m.n for m in cfg.methods}
    var = cfg.sweep.variable
    if var == "quad_points":
        n = _get({"n": value}, "sweep.values", "n", int)
        if n < 1:
            raise ConfigError(f"sweep.values: quad_points must be >= 1, got {value!r}")
        orders = {name: (n if name in _ORDERED_METHODS else existing)
                  for name, existing in orders.items()}
    elif var == "band":
        if not isinstance(value, list) or len(value) != len(bands):
            raise ConfigError(
                "sweep.values: each band value must list one entry per configured band"
            )
        new = []
        for i, (entry, base) in enumerate(zip(value, bands)):
            entry = dict(entry) if isinstance(entry, dict) else {}
            entry.setdefault("maturity", base.maturity)
            new.append(_parse_band(entry, f"sweep.values[..][{i}]"))
        bands = new
    elif var == "u1":
        bands[0] = StrikeBand(float(value), bands[0].lo, bands[0].hi)
    elif var == "u2":
        bands[1] = StrikeBand(float(value), bands[1].lo, bands[1].hi)
    elif var in _JUMP_FIELDS:
        model = replace(model, **{_JUMP_FIELDS[var]: float(value)})
        if cfg.sweep.hold_variance is not None:
            resid = cfg.sweep.hold_variance - model.lam * (model.mu_j ** 2 + model.sigma_j ** 2)
            if resid <= 0:
                raise ConfigError(
                    f"sweep.values: jump variance exceeds hold_variance at {value!r}"
                )
            model = replace(model, sigma=math.sqrt(resid))
    _check_band_order(bands, cfg.target)
    return model, bands, orders


def _build_portfolio(name, model, cfg, bands, orders):
    if name == "CW_a":
        return build_cw_a(model, cfg.target, cfg.spot, bands[0])
    if name == "CW_b":
        return build_cw_b(model, cfg.target, cfg.spot, bands[0], orders["CW_b"])
    if name == "GQ1":
        return build_gq1(model, cfg.target, cfg.spot, bands[0], orders["GQ1"])
    if name == "GQ2":
        return build_gq2(model, cfg.target, cfg.spot, bands[0], bands[1],
                         orders["GQ2"], cfg.modified_weight)
    if name == "GQn":
        return build_gq_n(model, cfg.target, cfg.spot, bands, orders["GQn"],
                          cfg.modified_weight)
    raise ConfigError(f"method {name!r} does not build a static portfolio")


def simulate_methods(cfg: ExperimentConfig, model, bands, orders):
    """Run the simulation block for one resolved context.

    Returns ``(stats, errors, paths)``: per-method checkpoint statistics
    and the raw discounted error matrices, all evaluated on one shared
    path set (common random numbers across methods).
    """
    sim = cfg.simulation
    sim_cfg = SimConfig(
        n_paths=sim.n_paths,
        seed=sim.seed,
        step=sim.step,
        horizon=sim.horizon,
        spot0=cfg.spot,
    )
    paths = simulate_paths(model, sim_cfg)
    step = sim.step
    indices = []
    for c in sim.checkpoints:
        idx = round(c / step)
        if abs(idx * step - c) > 1e-9:
            raise ConfigError(f"simulation.checkpoints: {c!r} is not on the step grid")
        indices.append((c, idx))
    stats = {}
    errors = {}
    for m in cfg.methods:
        if m.name == "DH":
            err = delta_hedge_run(paths, model, cfg.target)
        else:
            portfolio = _build_portfolio(m.name, model, cfg, bands, orders)
            err = static_hedge_run(paths, portfolio, model)
        errors[m.name] = err
        stats[m.name] = [
            {"time": c, **summarize(err[:, idx]).to_dict()} for c, idx in indices
        ]
    return stats, errors, paths


def _evaluate_value(cfg: ExperimentConfig, value):
    model, bands, orders = _value_context(cfg, value)
    methods = {}
    for m in cfg.methods:
        if m.name == "DH":
            methods[m.name] = {}
            continue
        portfolio = _build_portfolio(m.name, model, cfg, bands, orders)
        methods[m.name] = {
            "edl": -portfolio.b0,
            "legs": len(portfolio.legs),
            "n": len(portfolio.legs) if m.name == "CW_a" else orders.get(m.name),
        }
    pdl_value = None
    if "GQ1" in methods and "GQ2" in methods:
        a = methods["GQ1"]["edl"]
        b = methods["GQ2"]["edl"]
        if a != 0.0:
            pdl_value = (abs(a) - abs(b)) / abs(a) * 100.0
    if cfg.simulation is not None:
        stats, _, _ = simulate_methods(cfg, model, bands, orders)
        for name, stat_rows in stats.items():
            methods.setdefault(name, {})["stats"] = stat_rows
    return ReportRow(value, methods, pdl_value)


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> Report:
    """Evaluate every sweep value; rows keep the config's value order and
    the result is independent of ``threads``."""
    values = list(cfg.sweep.values)
    if threads > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda v: _evaluate_value(cfg, v), values))
    else:
        rows = [_evaluate_value(cfg, v) for v in values]
    metadata = {
        "package": "statichedge",
        "version": __version__,
        "sweep_variable": cfg.sweep.variable,
        "defaults": {
            "n_inner_gq": cfg.modified_weight.n_inner_gq,
            "n_laguerre": cfg.modified_weight.n_laguerre,
            "mjd_series": {"min_terms": 20, "pmf_cutoff": 1e-14, "max_terms": 180},
            "maturity_gap_guard": MATURITY_GAP,
        },
        "config": cfg.raw,
    }
    return Report(cfg.sweep.variable, rows, metadata)


def _method_names(report: Report):
    names = []
    for row in report.rows:
        for name in row.methods:
            if name not in names:
                names.append(name)
    return names


def _scalar_x(row, index):
    return row.sweep_value if np.isscalar(row.sweep_value) else index


def emit(report: Report, format: str, out_dir) -> list:
    """Write the report; returns the created file paths.

    ``csv``: one row per sweep value (wide; plus ``stats.csv`` long-form
    when simulation statistics are present).  ``json``: the full nested
    report.  ``plot``: per-method (x, edl, log10|edl|) series for figure
    reproduction.
    """
    if not report.rows:
        raise ConfigError("cannot emit an empty report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    names = _method_names(report)
    if format == "json":
        path = out / "report.json"
        path.write_text(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
        written.append(path)
    elif format == "csv":
        path = out / "report.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["sweep_value"]
            for name in names:
                header += [f"{name}_edl", f"{name}_legs"]
            header.append("pdl")
            writer.writerow(header)
            for row in report.rows:
                cells = [json.dumps(row.sweep_value)]
                for name in names:
                    info = row.methods.get(name, {})
                    cells += [_fmt(info.get("edl")), _fmt(info.get("legs"))]
                cells.append(_fmt(row.pdl))
                writer.writerow(cells)
        written.append(path)
        if any("stats" in info for row in report.rows for info in row.methods.values()):
            written.append(_emit_stats_csv(report, out, names))
    elif format == "plot":
        path = out / "series.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = ["x"]
            for name in names:
                header += [f"{name}_edl", f"{name}_log10_abs_edl"]
            writer.writerow(header)
            for index, row in enumerate(report.rows):
                cells = [_fmt(_scalar_x(row, index))]
                for name in names:
                    e = row.methods.get(name, {}).get("edl")
                    cells.append(_fmt(e))
                    cells.append(_fmt(math.log10(abs(e)) if e not in (None, 0.0) else None))
                writer.writerow(cells)
        written.append(path)
    else:
        raise ConfigError(f"unknown emit format {format!r}")
    return written


def _emit_stats_csv(report: Report, out: Path, names) -> Path:
    path = out / "stats.csv"
    stat_fields = ["p95", "p05", "rmse", "mean", "mae", "min", "max",
                   "skewness", "kurtosis", "degenerate"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep_value", "method", "time"] + stat_fields)
        for row in report.rows:
            for name in names:
                for stat in row.methods.get(name, {}).get("stats", []):
                    writer.writerow(
                        [json.dumps(row.sweep_value), name, _fmt(stat["time"])]
                        + [_fmt(stat[f]) for f in stat_fields]
                    )
    return path


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)
