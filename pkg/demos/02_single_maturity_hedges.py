"""Single-maturity static hedges: Hermite ladders vs band-limited quadrature.

Rebuilds the quadrature-count comparison on the wide band [0, 130]: the
band-limited Legendre hedge (GQ1) converges monotonically and then sits
still, while the fixed-order Hermite ladder with dropped rungs (CW_b)
fluctuates with the number of surviving strikes.
"""
from statichedge import BsParams, OptionRef, StrikeBand, build_cw_a, build_cw_b, build_gq1, call_price

S0 = 100.0
bs = BsParams(r=0.06, delta_yield=0.0, sigma=0.27, mu=0.1)
target = OptionRef(strike=100.0, maturity=1.0)
band = StrikeBand(maturity=0.1587, lo=0.0, hi=130.0)

target_price = call_price(bs, S0, 0.0, target.strike, target.maturity)
print(f"target value: {target_price:.7f}")

cw_a = build_cw_a(bs, target, S0, band)
print(f"\nCW_a picks the largest ladder inside the band: "
      f"{len(cw_a.legs)} legs, edl = {-cw_a.b0:+.4f}")
for leg in cw_a.legs:
    print(f"   strike {leg.strike:8.3f}  weight {leg.weight:8.5f}")

print(f"\n{'n':>4s} {'CW_b edl':>12s} {'kept':>5s} {'GQ1 edl':>12s}")
for n in (6, 8, 10, 15, 25, 50):
    cw_b = build_cw_b(bs, target, S0, band, n)
    gq1 = build_gq1(bs, target, S0, band, n)
    print(f"{n:4d} {-cw_b.b0:12.5f} {len(cw_b.legs):5d} {-gq1.b0:12.5f}")

print("\nGQ1 stabilizes at the (small) value of the strike mass above 130;")
print("CW_b's error depends on which rungs happen to survive the band.")
