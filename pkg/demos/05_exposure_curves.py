"""Potential-future-exposure envelopes through the life of the hedge.

Plots (or tabulates, without matplotlib) the discounted 95th/5th
percentile of the cross-path hedge error at every grid time: the
two-maturity hedge's envelope sits strictly inside the dropped-rung
ladder's until its short options expire.
"""
import numpy as np

from statichedge import (
    BsParams,
    OptionRef,
    SimConfig,
    StrikeBand,
    build_cw_b,
    build_gq2,
    pfe_curves,
    simulate_paths,
    static_hedge_run,
)

S0 = 100.0
model = BsParams(r=0.06, delta_yield=0.0, sigma=0.27, mu=0.1)
target = OptionRef(strike=100.0, maturity=1.0)
U1, U2, H = 40 / 252, 21 / 252, 1 / 252

paths = simulate_paths(model, SimConfig(1000, 20240601, H, U1, S0))
band1 = StrikeBand(U1, 80.0, 120.0)
band2 = StrikeBand(U2, 60.0, 120.0)

curves = {}
for name, portfolio in [
    ("CW_b", build_cw_b(model, target, S0, band1, 15)),
    ("GQ2", build_gq2(model, target, S0, band1, band2, 15)),
]:
    curves[name] = pfe_curves(static_hedge_run(paths, portfolio, model))

print(f"{'day':>4s} {'CW_b p95':>9s} {'CW_b p05':>9s} {'GQ2 p95':>9s} {'GQ2 p05':>9s}")
for i in range(0, 22, 3):
    print(f"{i:4d} {curves['CW_b'][95][i]:9.3f} {curves['CW_b'][5][i]:9.3f} "
          f"{curves['GQ2'][95][i]:9.3f} {curves['GQ2'][5][i]:9.3f}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    days = np.arange(len(paths.times))
    fig, ax = plt.subplots(figsize=(8, 5))
    for name, color in [("CW_b", "tab:red"), ("GQ2", "tab:blue")]:
        ax.plot(days, curves[name][95], color=color, label=f"{name} 95th")
        ax.plot(days, curves[name][5], color=color, linestyle="--", label=f"{name} 5th")
    ax.axvline(21, color="grey", linewidth=0.8)
    ax.set_xlabel("trading day")
    ax.set_ylabel("discounted hedge error percentile")
    ax.legend()
    fig.tight_layout()
    fig.savefig("exposure_curves.png", dpi=120)
    print("\nwrote exposure_curves.png")
except ImportError:
    print("\nmatplotlib not installed; skipped the plot")
