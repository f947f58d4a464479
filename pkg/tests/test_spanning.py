import math

import numpy as np
import pytest
from scipy.integrate import quad

from statichedge import (
    HedgePortfolio,
    ModifiedWeightConfig,
    OptionRef,
    SingularMaturityError,
    SpanningError,
    StrikeBand,
    UndefinedPdlError,
    build_cw_a,
    build_cw_b,
    build_gq1,
    build_gq2,
    build_gq_n,
    call_price,
    edl,
    hermite_strike_map,
    modified_weight,
    pdl,
    portfolio_from_csv,
    portfolio_to_csv,
    portfolio_value,
    strike_gamma_weight,
)

from conftest import BS_TARGET_PRICE, MATURITY, MJD_TARGET_PRICE, SPOT, STRIKE, U1, U2


def portfolio_edl(portfolio: HedgePortfolio) -> float:
    """Inception error (hedge minus target); b0 absorbs exactly the negative."""
    return -portfolio.b0


# ---------------------------------------------------------------------------
# Hermite strike ladders
# ---------------------------------------------------------------------------


def test_hermite_map_single_point_is_center(bs_model):
    ((strike, weight),) = hermite_strike_map(bs_model, STRIKE, MATURITY, U1, 1)
    tau = MATURITY - U1
    center = STRIKE * math.exp(
        (bs_model.delta_yield - bs_model.r - 0.5 * bs_model.sigma ** 2) * tau
    )
    assert strike == pytest.approx(center, rel=1e-12)
    assert weight > 0


def test_hermite_map_two_point_error(bs_model, target):
    pairs = hermite_strike_map(bs_model, STRIKE, MATURITY, U1, 2)
    hedge = sum(w * call_price(bs_model, SPOT, 0.0, k, U1) for k, w in pairs)
    assert edl(BS_TARGET_PRICE, hedge) == pytest.approx(0.9464, abs=5e-4)


def test_hermite_map_strikes_ascend(bs_model, mjd_model):
    for model in (bs_model, mjd_model):
        strikes = [k for k, _ in hermite_strike_map(model, STRIKE, MATURITY, U1, 12)]
        assert strikes == sorted(strikes)


def test_hermite_map_mjd_three_point_error(mjd_model):
    # The three-rung jump-model ladder misprices by -2.246 at these
    # parameters (the reference comparisons round it to -2.24).
    pairs = hermite_strike_map(mjd_model, STRIKE, MATURITY, U1, 3)
    hedge = sum(w * call_price(mjd_model, SPOT, 0.0, k, U1) for k, w in pairs)
    assert edl(MJD_TARGET_PRICE, hedge) == pytest.approx(-2.246, abs=1e-2)


def test_hermite_map_rejects_late_maturity(bs_model):
    with pytest.raises(SpanningError):
        hermite_strike_map(bs_model, STRIKE, MATURITY, MATURITY, 3)


# ---------------------------------------------------------------------------
# CW builders
# ---------------------------------------------------------------------------


def test_cw_a_wide_band(bs_model, target):
    portfolio = build_cw_a(bs_model, target, SPOT, StrikeBand(U1, 0.0, 130.0))
    assert len(portfolio.legs) == 2
    assert portfolio_edl(portfolio) == pytest.approx(0.9464, abs=5e-4)
    assert portfolio.method_tag == "CW_a"


def test_cw_a_narrow_band(bs_model, target):
    portfolio = build_cw_a(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0))
    assert len(portfolio.legs) == 1
    assert portfolio_edl(portfolio) == pytest.approx(-3.8, abs=0.05)


def test_cw_a_narrow_band_mjd(mjd_model, target):
    portfolio = build_cw_a(mjd_model, target, SPOT, StrikeBand(U1, 80.0, 120.0))
    assert len(portfolio.legs) == 1
    assert portfolio_edl(portfolio) == pytest.approx(-2.54, abs=0.01)


def test_cw_a_center_excluded(bs_model, target):
    with pytest.raises(SpanningError, match="center"):
        build_cw_a(bs_model, target, SPOT, StrikeBand(U1, 120.0, 130.0))


def test_cw_b_survivor_counts_and_errors(bs_model, target):
    band = StrikeBand(U1, 0.0, 130.0)
    p25 = build_cw_b(bs_model, target, SPOT, band, 25)
    assert len(p25.legs) == 15
    assert portfolio_edl(p25) == pytest.approx(3.2e-5, abs=5e-4)
    p10 = build_cw_b(bs_model, target, SPOT, band, 10)
    assert len(p10.legs) == 6
    assert portfolio_edl(p10) == pytest.approx(-0.01357, abs=5e-4)


def test_cw_b_mjd_high_order(mjd_model, target):
    portfolio = build_cw_b(mjd_model, target, SPOT, StrikeBand(U1, 0.0, 150.0), 100)
    assert len(portfolio.legs) == 56
    assert portfolio_edl(portfolio) == pytest.approx(-6.82e-6, abs=2e-5)


def test_cw_b_all_dropped(bs_model, target):
    band = StrikeBand(U1, 200.0, 210.0)
    with pytest.warns(UserWarning, match="pure cash"):
        portfolio = build_cw_b(bs_model, target, SPOT, band, 3)
    assert portfolio.legs == ()
    assert portfolio.b0 == pytest.approx(
        call_price(bs_model, SPOT, 0.0, STRIKE, MATURITY)
    )


# ---------------------------------------------------------------------------
# Single-maturity quadrature hedge
# ---------------------------------------------------------------------------

TABLE1_GQ1 = {6: -0.28426, 8: -0.05559, 10: -0.00625,
              15: -0.00067, 25: -0.00067, 50: -0.00067}


def test_gq1_band_limited_errors(bs_model, target):
    band = StrikeBand(U1, 0.0, 130.0)
    for n, expected in TABLE1_GQ1.items():
        portfolio = build_gq1(bs_model, target, SPOT, band, n)
        assert portfolio_edl(portfolio) == pytest.approx(expected, abs=5e-4), f"n={n}"


def test_gq1_mjd_errors(mjd_model, target):
    band = StrikeBand(U1, 0.0, 150.0)
    for n in (50, 100):
        portfolio = build_gq1(mjd_model, target, SPOT, band, n)
        assert portfolio_edl(portfolio) == pytest.approx(-8.98e-6, abs=2e-5)


def test_gq1_weights_nonnegative(bs_model, mjd_model, target):
    for model in (bs_model, mjd_model):
        portfolio = build_gq1(model, target, SPOT, StrikeBand(U1, 40.0, 160.0), 30)
        assert all(leg.weight >= 0 for leg in portfolio.legs)


def test_gq1_quadrature_count_stability(bs_model, target):
    # past ~25 nodes the band-limited hedge value stops moving
    band = StrikeBand(U1, 0.0, 130.0)
    for n in (25, 30, 40, 50):
        a = portfolio_edl(build_gq1(bs_model, target, SPOT, band, n))
        b = portfolio_edl(build_gq1(bs_model, target, SPOT, band, 2 * n))
        assert abs(a - b) < 1e-3


# ---------------------------------------------------------------------------
# Modified second-maturity weight
# ---------------------------------------------------------------------------


def test_modified_weight_vanishes_when_nothing_excluded(bs_model, target):
    band = StrikeBand(U1, 0.0, 1e6)
    for k2 in (50.0, 100.0, 150.0):
        assert modified_weight(bs_model, target, k2, band, U2) < 1e-10


def test_modified_weight_nonnegative(bs_model, mjd_model, target):
    band = StrikeBand(U1, 80.0, 120.0)
    grid = np.linspace(20.0, 220.0, 81)
    for model in (bs_model, mjd_model):
        values = modified_weight(model, target, grid, band, U2)
        assert np.all(values >= 0.0)


def test_modified_weight_respanning_identity(bs_model, target):
    # With accurate inner rules, the re-spanned second-maturity mass prices
    # back exactly the value the first band excluded.
    band = StrikeBand(U1, 80.0, 120.0)
    cfg = ModifiedWeightConfig(n_inner_gq=20, n_laguerre=20)

    lhs, _ = quad(
        lambda k2: modified_weight(bs_model, target, k2, band, U2, cfg)
        * call_price(bs_model, SPOT, 0.0, k2, U2),
        0.0, np.inf, limit=400,
    )
    inside, _ = quad(
        lambda k1: strike_gamma_weight(bs_model, k1, U1, STRIKE, MATURITY)
        * call_price(bs_model, SPOT, 0.0, k1, U1),
        band.lo, band.hi, limit=200,
    )
    rhs = call_price(bs_model, SPOT, 0.0, STRIKE, MATURITY) - inside
    assert lhs == pytest.approx(rhs, abs=1e-3)


def test_modified_weight_guard(bs_model, target):
    band = StrikeBand(U1, 80.0, 120.0)
    with pytest.raises(SingularMaturityError):
        modified_weight(bs_model, target, 100.0, band, U1 - 5e-5)
    with pytest.raises(SpanningError):
        modified_weight(bs_model, target, 100.0, band, U1 + 0.01)


# ---------------------------------------------------------------------------
# Two- and n-maturity quadrature hedges
# ---------------------------------------------------------------------------

TABLE2_ROWS = [
    # (band1, band2, gq1, gq2, pdl)
    ((80, 120), (80, 120), -8.9, -8.3, 6.7),
    ((80, 120), (75, 120), -8.9, -7.2, 19.5),
    ((80, 120), (55, 120), -8.9, 1.6, 82.2),
    ((60, 105), (60, 105), -2.1, -1.7, 20.0),
    ((75, 110), (75, 110), -7.1, -6.5, 9.4),
    ((55, 110), (75, 110), -1.0, -0.9, 6.7),
    ((55, 110), (65, 105), -1.0, -0.9, 4.7),
]

TABLE7_ROWS = [
    ((80, 120), (80, 120), -6.80, -6.52, 4.10),
    ((80, 120), (75, 120), -6.80, -4.86, 28.5),
    ((80, 120), (60, 120), -6.80, -1.21, 82.21),
]


def test_gq2_strike_band_sweep(bs_model, target):
    for (lo1, hi1), (lo2, hi2), e1, e2, _ in TABLE2_ROWS:
        p1 = build_gq1(bs_model, target, SPOT, StrikeBand(U1, lo1, hi1), 4)
        p2 = build_gq2(bs_model, target, SPOT, StrikeBand(U1, lo1, hi1),
                       StrikeBand(U2, lo2, hi2), 4)
        assert portfolio_edl(p1) == pytest.approx(e1, abs=0.1)
        assert portfolio_edl(p2) == pytest.approx(e2, abs=0.1)


def test_gq2_strike_band_sweep_mjd(mjd_model, target):
    for (lo1, hi1), (lo2, hi2), e1, e2, _ in TABLE7_ROWS:
        p1 = build_gq1(mjd_model, target, SPOT, StrikeBand(U1, lo1, hi1), 20)
        p2 = build_gq2(mjd_model, target, SPOT, StrikeBand(U1, lo1, hi1),
                       StrikeBand(U2, lo2, hi2), 20)
        assert portfolio_edl(p1) == pytest.approx(e1, abs=0.1)
        assert portfolio_edl(p2) == pytest.approx(e2, abs=0.1)


def test_gq2_second_maturity_always_helps(bs_model, mjd_model, target):
    for model, rows, n in ((bs_model, TABLE2_ROWS, 4), (mjd_model, TABLE7_ROWS, 20)):
        for (lo1, hi1), (lo2, hi2), *_ in rows:
            e1 = portfolio_edl(build_gq1(model, target, SPOT, StrikeBand(U1, lo1, hi1), n))
            e2 = portfolio_edl(build_gq2(model, target, SPOT, StrikeBand(U1, lo1, hi1),
                                         StrikeBand(U2, lo2, hi2), n))
            assert abs(e2) <= abs(e1)


def test_gq2_weights_nonnegative(bs_model, target):
    portfolio = build_gq2(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0),
                          StrikeBand(U2, 55.0, 120.0), 12)
    assert all(leg.weight >= 0 for leg in portfolio.legs)


def test_gq_n_two_bands_matches_gq2_bitwise(bs_model, target):
    b1 = StrikeBand(U1, 80.0, 120.0)
    b2 = StrikeBand(U2, 55.0, 120.0)
    via_2 = build_gq2(bs_model, target, SPOT, b1, b2, 7)
    via_n = build_gq_n(bs_model, target, SPOT, [b1, b2], 7)
    assert via_2.legs == via_n.legs
    assert via_2.b0 == via_n.b0


def test_gq_n_single_band_matches_gq1(bs_model, target):
    band = StrikeBand(U1, 80.0, 120.0)
    assert build_gq_n(bs_model, target, SPOT, [band], 9).legs == \
        build_gq1(bs_model, target, SPOT, band, 9).legs


def test_gq_n_third_band_never_hurts(bs_model, target):
    b1 = StrikeBand(U1, 80.0, 120.0)
    b2 = StrikeBand(U2, 80.0, 120.0)
    b3 = StrikeBand(0.04, 0.0, 1e6)
    e2 = portfolio_edl(build_gq2(bs_model, target, SPOT, b1, b2, 4))
    e3 = portfolio_edl(build_gq_n(bs_model, target, SPOT, [b1, b2, b3], 4))
    assert abs(e3) <= abs(e2) + 1e-12


def test_gq_n_band_validation(bs_model, target):
    b1 = StrikeBand(U1, 80.0, 120.0)
    bands5 = [StrikeBand(U1 - 0.03 * i, 80.0, 120.0) for i in range(5)]
    with pytest.raises(SpanningError, match="at most"):
        build_gq_n(bs_model, target, SPOT, bands5, 4)
    with pytest.raises(SpanningError, match="decreasing"):
        build_gq_n(bs_model, target, SPOT, [b1, StrikeBand(U1 + 0.05, 80.0, 120.0)], 4)
    with pytest.raises(SingularMaturityError):
        build_gq_n(bs_model, target, SPOT,
                   [b1, StrikeBand(U1 - 5e-5, 80.0, 120.0)], 4)
    with pytest.raises(SpanningError):
        build_gq1(bs_model, target, SPOT, StrikeBand(MATURITY + 0.1, 80.0, 120.0), 4)
    put_target = OptionRef(STRIKE, MATURITY, kind="put")
    with pytest.raises(SpanningError, match="call"):
        build_gq1(bs_model, put_target, SPOT, b1, 4)


# ---------------------------------------------------------------------------
# Valuation and diagnostics
# ---------------------------------------------------------------------------


def test_portfolio_value_empty_and_single_leg(bs_model, target):
    empty = HedgePortfolio(target, SPOT, (), 0.0, "CW_b")
    assert portfolio_value(empty, bs_model, SPOT, 0.0) == 0.0
    single = build_cw_a(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0))
    leg = single.legs[0]
    expected = leg.weight * call_price(bs_model, SPOT, 0.0, leg.strike, leg.maturity)
    assert portfolio_value(single, bs_model, SPOT, 0.0) == pytest.approx(expected)


def test_portfolio_value_reference_level(bs_model, target):
    # the stable band-limited hedge is worth the target minus the small
    # strike mass above the band cutoff
    portfolio = build_gq1(bs_model, target, SPOT, StrikeBand(U1, 0.0, 130.0), 25)
    value = portfolio_value(portfolio, bs_model, SPOT, 0.0)
    assert value == pytest.approx(BS_TARGET_PRICE - 0.00067, abs=1e-4)


def test_portfolio_value_at_leg_maturity_is_intrinsic(bs_model, target):
    portfolio = build_gq1(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0), 3)
    expected = sum(leg.weight * max(110.0 - leg.strike, 0.0) for leg in portfolio.legs)
    assert portfolio_value(portfolio, bs_model, 110.0, U1) == pytest.approx(expected)


def test_edl_and_pdl():
    assert edl(13.5926277, 13.5926277) == 0.0
    assert pdl(-8.9, -8.3) == pytest.approx(6.7, abs=0.05)
    assert pdl(1.25, 1.25) == 0.0
    assert pdl(-1.25, -1.25) == 0.0
    with pytest.raises(UndefinedPdlError):
        pdl(0.0, 1.0)


def test_b0_is_negative_edl(bs_model, target):
    portfolio = build_gq1(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0), 10)
    hedge = portfolio_value(portfolio, bs_model, SPOT, 0.0)
    tgt = call_price(bs_model, SPOT, 0.0, STRIKE, MATURITY)
    assert portfolio.b0 == pytest.approx(tgt - hedge, abs=1e-12)
    assert edl(tgt, hedge) == pytest.approx(-portfolio.b0, abs=1e-12)


def test_legs_sorted_by_maturity_then_strike(bs_model, target):
    portfolio = build_gq2(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0),
                          StrikeBand(U2, 55.0, 120.0), 5)
    keys = [(leg.maturity, leg.strike) for leg in portfolio.legs]
    assert keys == sorted(keys)


# ---------------------------------------------------------------------------
# Maturity-spacing behavior
# ---------------------------------------------------------------------------


def test_gq1_improves_with_later_first_maturity(bs_model, target):
    # Table-4 pattern: wide band, error magnitude shrinks as u1 grows
    values = []
    for u1 in (0.0833, 0.1587, 0.3175, 0.6349):
        p = build_gq1(bs_model, target, SPOT, StrikeBand(u1, 60.0, 120.0), 15)
        values.append(portfolio_edl(p))
    expected = [-2.36, -1.91, -1.11, -0.27]
    for got, want in zip(values, expected):
        assert got == pytest.approx(want, abs=0.05)
    assert all(abs(a) > abs(b) for a, b in zip(values, values[1:]))


def test_gq2_error_shrinks_as_u2_approaches_u1(bs_model, target):
    b1 = StrikeBand(U1, 80.0, 120.0)
    magnitudes = []
    for u2 in (0.02, 0.04, 0.06, 0.08):
        p = build_gq2(bs_model, target, SPOT, b1, StrikeBand(u2, 55.0, 120.0), 20)
        magnitudes.append(abs(portfolio_edl(p)))
    assert all(a > b for a, b in zip(magnitudes, magnitudes[1:]))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_portfolio_csv_round_trip(bs_model, target, tmp_path):
    portfolio = build_gq2(bs_model, target, SPOT, StrikeBand(U1, 80.0, 120.0),
                          StrikeBand(U2, 55.0, 120.0), 6)
    path = tmp_path / "portfolio.csv"
    portfolio_to_csv(portfolio, path)
    loaded = portfolio_from_csv(path)
    assert loaded == portfolio


def test_portfolio_csv_missing_header(tmp_path):
    path = tmp_path / "broken.csv"
    path.write_text("maturity,strike,weight\n0.1,100.0,1.0\n")
    with pytest.raises(SpanningError, match="missing header"):
        portfolio_from_csv(path)
