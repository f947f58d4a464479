"""Static hedge portfolio construction and inception-error diagnostics.

A long-dated call is replicated with baskets of shorter-dated calls in two
families:

* ``CW_a`` / ``CW_b``: Gauss-Hermite ladders.  A log-normal change of
  variables turns the gamma-weighted spanning integral into a Hermite
  integral, so the ladder strikes are the Hermite nodes mapped through
  ``hermite_strike_map``.  ``CW_a`` picks the largest ladder that fits the
  available strike band; ``CW_b`` uses a fixed order and drops rungs that
  fall outside the band.
* ``GQ1`` / ``GQ2`` / ``GQn``: band-limited Gauss-Legendre hedges.  ``GQ1``
  quadratures the gamma weight over one maturity's strike band.  Adding a
  second (shorter) maturity re-spans the strike mass the first band could
  not reach: its legs carry the ``modified_weight`` obtained by pushing the
  excluded gamma mass through the inter-maturity gamma kernel.  ``GQn``
  iterates the same construction over up to four maturities.

Every portfolio records ``b0``, the signed cash residual that makes the
package worth exactly the target at inception (invested at the risk-free
rate by the simulation harness).  ``edl`` is the matching inception
diagnostic, reported as hedge value minus target value.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SingularMaturityError, SpanningError, UndefinedPdlError
from .models import (
    ModelSpec,
    MjdParams,
    OptionRef,
    annualized_variance,
    call_price,
    strike_gamma_weight,
)
from .quadrature import HERMITE, LAGUERRE, LEGENDRE, ORDER_CAP, make_rule, map_to_interval

__all__ = [
    "StrikeBand",
    "HedgeLeg",
    "HedgePortfolio",
    "ModifiedWeightConfig",
    "hermite_strike_map",
    "build_cw_a",
    "build_cw_b",
    "build_gq1",
    "build_gq2",
    "build_gq_n",
    "modified_weight",
    "portfolio_value",
    "edl",
    "pdl",
    "portfolio_to_csv",
    "portfolio_from_csv",
]

# Reject short maturities closer than this gap: the inter-maturity kernel
# has the maturity spacing in its denominator and degenerates as it closes.
MATURITY_GAP = 1e-4

# Builders recurse over at most this many short maturities; the nested
# re-spanning cost grows with each level.
MAX_BANDS = 4


@dataclass(frozen=True)
class StrikeBand:
    """Available strike interval [lo, hi] for options of one maturity."""

    maturity: float
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.maturity > 0.0 and math.isfinite(self.maturity)):
            raise SpanningError(f"band maturity must be > 0, got {self.maturity!r}")
        if not (0.0 <= self.lo < self.hi):
            raise SpanningError(f"need 0 <= lo < hi, got [{self.lo!r}, {self.hi!r}]")
        if not math.isfinite(self.hi):
            raise SpanningError("band upper strike must be finite")

    def contains(self, strike: float) -> bool:
        return self.lo <= strike <= self.hi


@dataclass(frozen=True)
class HedgeLeg:
    """One short-maturity call position: strike, maturity, signed quantity."""

    strike: float
    maturity: float
    weight: float


@dataclass(frozen=True)
class HedgePortfolio:
    """A static basket of short-maturity calls plus the cash residual ``b0``.

    ``b0 = target value - sum of leg values`` at inception, so the package
    (legs + cash) matches the target exactly at time 0; legs are sorted by
    (maturity, strike).
    """

    target: OptionRef
    spot: float
    legs: tuple[HedgeLeg, ...]
    b0: float
    method_tag: str

    @property
    def maturities(self) -> tuple[float, ...]:
        return tuple(sorted({leg.maturity for leg in self.legs}))


@dataclass(frozen=True)
class ModifiedWeightConfig:
    """Inner quadrature orders for the excluded-region integrals: a Legendre
    rule below the band and a shifted Laguerre rule above it."""

    n_inner_gq: int = 5
    n_laguerre: int = 20

    def __post_init__(self):
        if self.n_inner_gq < 1 or self.n_laguerre < 1:
            raise SpanningError("modified-weight quadrature orders must be >= 1")


def _require_call_target(target: OptionRef):
    if target.kind != "call":
        raise SpanningError(
            "hedge builders support call targets; price puts via put-call parity"
        )


def _require_short(band: StrikeBand, target: OptionRef):
    if band.maturity >= target.maturity:
        raise SpanningError(
            f"short maturity {band.maturity!r} must precede the target "
            f"maturity {target.maturity!r}"
        )


def hermite_strike_map(model: ModelSpec, K: float, T: float, u: float, n: int):
    """Hermite ladder of ``n`` (strike, weight) pairs for maturity ``u``.

    Strikes follow the log-normal map ``K exp(x_j s + (q - r - V/2)(T-u))``
    with ``s = sqrt(2 V (T-u))``, where V is the diffusion variance under
    plain GBM and the total annualized variance under jump diffusion.  Each
    weight is the gamma weight at the mapped strike times the Jacobian of
    the map, divided by the Hermite density ``e^{-x_j^2}``.  Strikes come
    out ascending.
    """
    if u >= T:
        raise SpanningError(f"need u < T, got u={u!r}, T={T!r}")
    tau = T - u
    if isinstance(model, MjdParams):
        var = annualized_variance(model)
    else:
        var = model.sigma ** 2
    spread = math.sqrt(2.0 * var * tau)
    drift = (model.delta_yield - model.r - 0.5 * var) * tau
    rule = make_rule(HERMITE, n)
    strikes = K * np.exp(rule.nodes * spread + drift)
    gammas = strike_gamma_weight(model, strikes, u, K, T)
    weights = gammas * strikes * spread * rule.weights * np.exp(rule.nodes ** 2)
    return list(zip(strikes.tolist(), np.asarray(weights).reshape(-1).tolist()))


def _assemble(model, target, spot, legs, tag) -> HedgePortfolio:
    legs = tuple(sorted(legs, key=lambda leg: (leg.maturity, leg.strike)))
    value = sum(
        leg.weight * call_price(model, spot, 0.0, leg.strike, leg.maturity)
        for leg in legs
    )
    b0 = call_price(model, spot, 0.0, target.strike, target.maturity) - value
    return HedgePortfolio(target, float(spot), legs, float(b0), tag)


def build_cw_a(model: ModelSpec, target: OptionRef, S: float, band: StrikeBand) -> HedgePortfolio:
    """Largest Hermite ladder whose strikes all fit inside the band.

    The order search starts at 1 and stops at the first order with a strike
    outside ``[band.lo, band.hi]``; the previous order wins.
    """
    _require_call_target(target)
    _require_short(band, target)
    chosen = None
    for n in range(1, ORDER_CAP[HERMITE] + 1):
        pairs = hermite_strike_map(model, target.strike, target.maturity, band.maturity, n)
        if all(band.contains(k) for k, _ in pairs):
            chosen = pairs
            continue
        if chosen is None:
            raise SpanningError(
                f"band [{band.lo}, {band.hi}] excludes the hermite center strike "
                f"{pairs[0][0]:.4f}"
            )
        break
    legs = [HedgeLeg(k, band.maturity, w) for k, w in chosen]
    return _assemble(model, target, S, legs, "CW_a")


def build_cw_b(model: ModelSpec, target: OptionRef, S: float, band: StrikeBand, n: int) -> HedgePortfolio:
    """Fixed-order Hermite ladder with out-of-band strikes dropped."""
    _require_call_target(target)
    _require_short(band, target)
    pairs = hermite_strike_map(model, target.strike, target.maturity, band.maturity, n)
    kept = [(k, w) for k, w in pairs if band.contains(k)]
    if not kept:
        warnings.warn(
            f"all {n} hermite strikes fall outside [{band.lo}, {band.hi}]; "
            "portfolio is pure cash",
            stacklevel=2,
        )
    legs = [HedgeLeg(k, band.maturity, w) for k, w in kept]
    return _assemble(model, target, S, legs, "CW_b")


def _excluded_region_rule(band: StrikeBand, cfg: ModifiedWeightConfig):
    """Quadrature nodes/weights for integrals over [0, lo] union [hi, inf).

    The left piece is a mapped Legendre rule (skipped when ``lo == 0``: the
    interval is zero-width and Legendre nodes are interior anyway).  The
    right tail is a shifted Laguerre rule with the exponential weight
    divided back out; the gamma-kernel integrands decay log-normally,
    much faster than ``e^{-x}``, so a modest order suffices.
    """
    nodes, weights = [], []
    if band.lo > 0.0:
        inner = map_to_interval(make_rule(LEGENDRE, cfg.n_inner_gq), 0.0, band.lo)
        nodes.append(inner.nodes)
        weights.append(inner.weights)
    lag = make_rule(LAGUERRE, cfg.n_laguerre)
    nodes.append(lag.nodes + band.hi)
    weights.append(lag.weights * np.exp(lag.nodes))
    return np.concatenate(nodes), np.concatenate(weights)


def _level_weight(model, target, x, u, carry):
    """Evaluate the spanning weight for maturity ``u`` at strikes ``x``.

    ``carry`` is None at the first (longest) short maturity, where the
    weight is the target option's gamma; deeper levels push the previous
    level's excluded mass through the inter-maturity gamma kernel.
    """
    x = np.asarray(x, dtype=float)
    if carry is None:
        return strike_gamma_weight(model, x, u, target.strike, target.maturity)
    prev_nodes, prev_vals, prev_u = carry
    kernel = strike_gamma_weight(model, x[..., None], u, prev_nodes, prev_u)
    return kernel @ prev_vals


def _validate_bands(bands, target):
    if not bands:
        raise SpanningError("at least one strike band is required")
    if len(bands) > MAX_BANDS:
        raise SpanningError(
            f"at most {MAX_BANDS} short maturities supported, got {len(bands)}"
        )
    _require_short(bands[0], target)
    for earlier, later in zip(bands, bands[1:]):
        if later.maturity >= earlier.maturity:
            raise SpanningError("band maturities must be strictly decreasing")
        if earlier.maturity - later.maturity < MATURITY_GAP:
            raise SingularMaturityError(
                f"maturities {earlier.maturity!r} and {later.maturity!r} are "
                f"closer than the {MATURITY_GAP:g}-year guard; the "
                "inter-maturity weight degenerates there"
            )


def _build_gq(model, target, S, bands, n, cfg, tag) -> HedgePortfolio:
    _require_call_target(target)
    _validate_bands(bands, target)
    legs = []
    carry = None
    for i, band in enumerate(bands):
        rule = map_to_interval(make_rule(LEGENDRE, n), band.lo, band.hi)
        wt = _level_weight(model, target, rule.nodes, band.maturity, carry)
        legs.extend(
            HedgeLeg(float(k), band.maturity, float(w))
            for k, w in zip(rule.nodes, rule.weights * wt)
        )
        if i + 1 < len(bands):
            ex_nodes, ex_wts = _excluded_region_rule(band, cfg)
            ex_vals = _level_weight(model, target, ex_nodes, band.maturity, carry)
            carry = (ex_nodes, ex_wts * ex_vals, band.maturity)
    return _assemble(model, target, S, legs, tag)


def build_gq1(model: ModelSpec, target: OptionRef, S: float, band: StrikeBand, n: int) -> HedgePortfolio:
    """Single-maturity Legendre hedge: leg strikes at the mapped nodes of an
    order-``n`` rule on the band, weighted by the gamma weight there."""
    return _build_gq(model, target, S, [band], n, ModifiedWeightConfig(), "GQ1")


def build_gq2(
    model: ModelSpec,
    target: OptionRef,
    S: float,
    band1: StrikeBand,
    band2: StrikeBand,
    n: int,
    cfg: ModifiedWeightConfig = ModifiedWeightConfig(),
) -> HedgePortfolio:
    """Two-maturity hedge: band1 legs as in ``build_gq1`` plus band2 legs
    carrying the modified weight that re-spans band1's excluded strike mass."""
    return _build_gq(model, target, S, [band1, band2], n, cfg, "GQ2")


def build_gq_n(
    model: ModelSpec,
    target: OptionRef,
    S: float,
    bands,
    n: int,
    cfg: ModifiedWeightConfig = ModifiedWeightConfig(),
) -> HedgePortfolio:
    """Iterated multi-maturity hedge over strictly decreasing maturities.

    Each level's weight pushes the previous level's out-of-band mass
    through the inter-maturity gamma kernel; with one band this reduces to
    ``build_gq1`` and with two it reproduces ``build_gq2`` exactly.
    """
    return _build_gq(model, target, S, list(bands), n, cfg, "GQn")


def modified_weight(
    model: ModelSpec,
    target: OptionRef,
    k2,
    band1: StrikeBand,
    u2: float,
    cfg: ModifiedWeightConfig = ModifiedWeightConfig(),
):
    """Second-maturity weight: the gamma mass excluded by ``band1`` pushed
    down to maturity ``u2``.

    Computes ``integral over [0, lo] union [hi, inf) of w(y) w2(k2, y) dy``
    with ``w`` the target's gamma weight at the band maturity and ``w2`` the
    inter-maturity gamma kernel, using the configured inner rules.
    Nonnegative for every ``k2`` since both factors are gamma densities;
    identically ~0 when the band excludes nothing.  ``k2`` may be a scalar
    or an array.
    """
    if u2 >= band1.maturity:
        raise SpanningError(f"need u2 < band maturity, got u2={u2!r}")
    if band1.maturity - u2 < MATURITY_GAP:
        raise SingularMaturityError(
            f"u2={u2!r} is within the {MATURITY_GAP:g}-year guard of the "
            f"band maturity {band1.maturity!r}"
        )
    nodes, wts = _excluded_region_rule(band1, cfg)
    vals = wts * strike_gamma_weight(
        model, nodes, band1.maturity, target.strike, target.maturity
    )
    x = np.asarray(k2, dtype=float)
    kernel = strike_gamma_weight(model, x[..., None], u2, nodes, band1.maturity)
    out = kernel @ vals
    return float(out) if np.ndim(k2) == 0 else out


def portfolio_value(portfolio: HedgePortfolio, model: ModelSpec, S, t: float):
    """Mark the legs (only) at spot ``S`` and time ``t``; legs at maturity
    are worth intrinsic value.  The cash residual ``b0`` is not included."""
    total = 0.0
    for leg in portfolio.legs:
        total = total + leg.weight * call_price(model, S, t, leg.strike, leg.maturity)
    return total


def edl(target_value: float, hedge_value: float) -> float:
    """Signed inception error of a hedge: hedge value minus target value.

    Negative values mean the basket is worth less than the target (the
    shortfall is borrowed as ``b0 = -edl`` to complete the package); this
    is the sign convention used throughout the reported comparisons.
    """
    return hedge_value - target_value


def pdl(edl_gq1: float, edl_gq2: float) -> float:
    """Percentage decrease in loss from adding the second maturity:
    (|edl_gq1| - |edl_gq2|) / |edl_gq1| * 100."""
    if edl_gq1 == 0.0:
        raise UndefinedPdlError("reference loss is zero; PDL undefined")
    return (abs(edl_gq1) - abs(edl_gq2)) / abs(edl_gq1) * 100.0


_HEADER_PREFIX = "# "


def portfolio_to_csv(portfolio: HedgePortfolio, path):
    """Serialize to the flat record format: ``key=value`` header comments
    (method tag, target descriptor, spot, b0) then one ``maturity,strike,
    weight`` row per leg, full float precision."""
    lines = [
        "# statichedge portfolio v1",
        f"# method_tag={portfolio.method_tag}",
        f"# target_kind={portfolio.target.kind}",
        f"# target_strike={portfolio.target.strike!r}",
        f"# target_maturity={portfolio.target.maturity!r}",
        f"# spot={portfolio.spot!r}",
        f"# b0={portfolio.b0!r}",
        "maturity,strike,weight",
    ]
    lines.extend(
        f"{leg.maturity!r},{leg.strike!r},{leg.weight!r}" for leg in portfolio.legs
    )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def portfolio_from_csv(path) -> HedgePortfolio:
    """Inverse of ``portfolio_to_csv``."""
    meta = {}
    legs = []
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    for line in rows:
        if line.startswith(_HEADER_PREFIX.strip()):
            body = line.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
        elif line and not line.startswith("maturity"):
            maturity, strike, weight = (float(part) for part in line.split(","))
            legs.append(HedgeLeg(strike, maturity, weight))
    try:
        target = OptionRef(
            strike=float(meta["target_strike"]),
            maturity=float(meta["target_maturity"]),
            kind=meta.get("target_kind", "call"),
        )
        return HedgePortfolio(
            target=target,
            spot=float(meta["spot"]),
            legs=tuple(sorted(legs, key=lambda leg: (leg.maturity, leg.strike))),
            b0=float(meta["b0"]),
            method_tag=meta.get("method_tag", "unknown"),
        )
    except KeyError as exc:
        raise SpanningError(f"portfolio file {path} missing header field {exc}") from exc
