"""Pricing basics and the gamma weight that drives every hedge.

Prices the benchmark one-year at-the-money call under both models, checks
put-call parity, and tabulates the gamma weight w(x) = d2C/dx2(x, u, K, T)
whose bell shape decides where hedge strikes should sit.
"""
import numpy as np

from statichedge import (
    BsParams,
    MjdParams,
    annualized_variance,
    call_price,
    delta,
    put_price,
    strike_gamma_weight,
)

S0, K, T, U1 = 100.0, 100.0, 1.0, 0.1587

bs = BsParams(r=0.06, delta_yield=0.0, sigma=0.27, mu=0.1)
mjd = MjdParams(r=0.06, delta_yield=0.02, sigma=0.14,
                lam=2.0, mu_j=-0.1, sigma_j=0.13, mu=0.1)

print("=== benchmark call, S0 = K = 100, T = 1 ===")
for name, model in [("plain diffusion", bs), ("jump diffusion", mjd)]:
    c = call_price(model, S0, 0.0, K, T)
    p = put_price(model, S0, 0.0, K, T)
    d = delta(model, S0, 0.0, K, T)
    print(f"{name:16s} call={c:.7f}  put={p:.7f}  delta={d:.5f}")

print(f"\njump model annualized variance: {annualized_variance(mjd):.4f} "
      f"(diffusion-only would be {mjd.sigma ** 2:.4f})")

print(f"\n=== gamma weight across spot levels at u = {U1} ===")
grid = np.linspace(60.0, 150.0, 10)
w_bs = strike_gamma_weight(bs, grid, U1, K, T)
w_mjd = strike_gamma_weight(mjd, grid, U1, K, T)
print(f"{'x':>6s} {'w (plain)':>12s} {'w (jump)':>12s}")
for x, a, b in zip(grid, w_bs, w_mjd):
    print(f"{x:6.1f} {a:12.6f} {b:12.6f}")

# the bell integrates to the dividend discount over the remaining life
from scipy.integrate import quad

total, _ = quad(lambda x: strike_gamma_weight(bs, x, U1, K, T), 0, np.inf, limit=300)
print(f"\nintegral of w over all spot levels: {total:.10f} (= e^{{-q(T-u)}} = 1 here)")
