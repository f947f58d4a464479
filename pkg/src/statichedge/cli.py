"""Command line front end for the experiment runner.

Subcommands: ``price`` (target option value), ``build`` (print/serialize
the hedge leg tables), ``sweep`` (full report over the sweep values),
``simulate`` (hedge-error statistics; ``--errors`` also dumps the raw
error matrices), and ``pfe`` (per-time exposure percentile series).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, NumericalError
from .experiments import (
    _build_portfolio,
    _value_context,
    emit,
    load_config,
    run_experiment,
    simulate_methods,
)
from .models import call_price
from .simulation import pfe_curves, write_errors_csv
from .spanning import portfolio_to_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statichedge",
        description="Static hedge construction and hedge-error experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("price", "print the target option value under the configured model"),
        ("build", "build the hedge portfolios and print their leg tables"),
        ("sweep", "run the configured sweep and emit a report"),
        ("simulate", "run the Monte-Carlo hedge comparison and emit statistics"),
        ("pfe", "emit per-time exposure percentile curves for each method"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="experiment config file (JSON)")
        cmd.add_argument("--out", default=None, help="output directory")
        cmd.add_argument("--format", default="csv", choices=["csv", "json", "plot"])
        cmd.add_argument("--threads", type=int, default=1)
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the simulation seed")
        if name == "simulate":
            cmd.add_argument("--errors", action="store_true",
                             help="also dump raw error matrices per method")
    return parser


def _apply_seed(cfg, seed):
    if seed is None or cfg.simulation is None:
        return cfg
    return replace(cfg, simulation=replace(cfg.simulation, seed=seed))


def _cmd_price(cfg, args):
    value = call_price(cfg.model, cfg.spot, 0.0, cfg.target.strike, cfg.target.maturity)
    print(f"target_price={value!r}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "price.json").write_text(
            json.dumps({"target_price": value}, sort_keys=True, indent=2) + "\n"
        )
    return EXIT_OK


def _cmd_build(cfg, args):
    model, bands, orders = _value_context(cfg, cfg.sweep.values[0])
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for method in cfg.methods:
        if method.name == "DH":
            continue
        portfolio = _build_portfolio(method.name, model, cfg, bands, orders)
        print(f"[{portfolio.method_tag}] legs={len(portfolio.legs)} "
              f"b0={portfolio.b0!r} edl={-portfolio.b0!r}")
        print("maturity,strike,weight")
        for leg in portfolio.legs:
            print(f"{leg.maturity!r},{leg.strike!r},{leg.weight!r}")
        if out:
            portfolio_to_csv(portfolio, out / f"portfolio_{portfolio.method_tag}.csv")
    return EXIT_OK


def _cmd_sweep(cfg, args):
    report = run_experiment(cfg, threads=max(1, args.threads))
    written = emit(report, args.format, args.out or ".")
    for path in written:
        print(path)
    return EXIT_OK


def _require_simulation(cfg):
    if cfg.simulation is None:
        raise ConfigError("simulation: block required for this subcommand")


def _cmd_simulate(cfg, args):
    _require_simulation(cfg)
    report = run_experiment(cfg, threads=max(1, args.threads))
    written = emit(report, "json" if args.format == "json" else "csv", args.out or ".")
    if getattr(args, "errors", False):
        out = Path(args.out or ".")
        model, bands, orders = _value_context(cfg, cfg.sweep.values[0])
        _, errors, paths = simulate_methods(cfg, model, bands, orders)
        for name, matrix in errors.items():
            path = out / f"errors_{name}.csv"
            write_errors_csv(path, paths.times, matrix)
            written.append(path)
    for path in written:
        print(path)
    return EXIT_OK


def _cmd_pfe(cfg, args):
    _require_simulation(cfg)
    model, bands, orders = _value_context(cfg, cfg.sweep.values[0])
    _, errors, paths = simulate_methods(cfg, model, bands, orders)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "pfe.csv"
    names = list(errors)
    with open(path, "w", newline="") as fh:
        header = ["time"] + [f"{name}_p{level}" for name in names for level in (95, 5)]
        fh.write(",".join(header) + "\n")
        curves = {name: pfe_curves(errors[name]) for name in names}
        for i, t in enumerate(paths.times):
            cells = [repr(float(t))]
            for name in names:
                cells.append(repr(float(curves[name][95][i])))
                cells.append(repr(float(curves[name][5][i])))
            fh.write(",".join(cells) + "\n")
    print(path)
    return EXIT_OK


_COMMANDS = {
    "price": _cmd_price,
    "build": _cmd_build,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "pfe": _cmd_pfe,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _apply_seed(load_config(args.config), args.seed)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
