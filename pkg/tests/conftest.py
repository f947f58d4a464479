import pytest

from statichedge import BsParams, MjdParams, OptionRef

# Benchmark setup shared across suites: at-the-money one-year call, spot 100.
SPOT = 100.0
STRIKE = 100.0
MATURITY = 1.0
U1 = 0.1587
U2 = 0.0833

# Exact day-count variants used by the simulation experiments so hedge-leg
# maturities land on the step grid.
U1_GRID = 40 / 252
U2_GRID = 21 / 252
STEP = 1 / 252

BS_TARGET_PRICE = 13.5926277
MJD_TARGET_PRICE = 11.9882525


@pytest.fixture(scope="session")
def bs_model():
    return BsParams(r=0.06, delta_yield=0.0, sigma=0.27, mu=0.1)


@pytest.fixture(scope="session")
def mjd_model():
    return MjdParams(r=0.06, delta_yield=0.02, sigma=0.14,
                     lam=2.0, mu_j=-0.1, sigma_j=0.13, mu=0.1)


@pytest.fixture(scope="session")
def target():
    return OptionRef(strike=STRIKE, maturity=MATURITY)
