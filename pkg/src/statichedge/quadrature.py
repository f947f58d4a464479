"""Gaussian quadrature rules and integration combinators.

Three classical families are exposed through a single ``make_rule`` entry
point, each exact for polynomials of degree <= 2n-1 against its weight:

* Legendre:  integral_{-1}^{1} f(x) dx            ~ sum w_i f(x_i)
* Hermite:   integral_{-inf}^{inf} e^{-x^2} f(x) dx ~ sum w_i f(x_i)
* Laguerre:  integral_{0}^{inf} e^{-x} f(x) dx      ~ sum w_i f(x_i)

On top of the raw rules sit the two combinators the hedge builders need:
``integrate_bounded`` (affine map of a Legendre rule onto ``[a, b]``) and
``integrate_shifted_laguerre`` (a Laguerre rule translated to start at a
finite lower limit, with the exponential weight divided back out so the
plain integral of ``f`` is approximated).

Rules are cached per ``(kind, order)`` because experiment sweeps reuse
them thousands of times.  Cached rules are immutable (read-only arrays)
and safe to share across threads; the cache itself is a thread-safe
idempotent insert.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite, roots_laguerre, roots_legendre

from .errors import IntegrationError, QuadratureError

__all__ = [
    "QuadratureRule",
    "make_rule",
    "map_to_interval",
    "integrate_bounded",
    "integrate_shifted_laguerre",
]

LEGENDRE = "legendre"
HERMITE = "hermite"
LAGUERRE = "laguerre"

# Laguerre weights underflow to exact zero in binary64 slightly below order
# 200 (the largest node passes e^-x below the smallest subnormal), so that
# family is capped lower than the other two.
ORDER_CAP = {LEGENDRE: 200, HERMITE: 200, LAGUERRE: 180}

_CANONICAL_DOMAIN = {
    LEGENDRE: (-1.0, 1.0),
    HERMITE: (-math.inf, math.inf),
    LAGUERRE: (0.0, math.inf),
}

_ROOTS = {
    LEGENDRE: roots_legendre,
    HERMITE: roots_hermite,
    LAGUERRE: roots_laguerre,
}


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a Gaussian rule on its domain.

    Invariants: nodes strictly ascending, weights strictly positive, and
    the weight sum matches the integral of 1 against the family weight
    (2 for Legendre, sqrt(pi) for Hermite, 1 for Laguerre).
    """

    kind: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)


def _normalize_kind(kind):
    k = str(kind).strip().lower()
    if k not in _ROOTS:
        raise QuadratureError(
            f"unknown rule kind {kind!r}; expected one of {sorted(_ROOTS)}"
        )
    return k


@lru_cache(maxsize=None)
def _cached_rule(kind: str, n: int) -> QuadratureRule:
    x, w = _ROOTS[kind](n)
    return QuadratureRule(kind, n, np.asarray(x, dtype=float),
                          np.asarray(w, dtype=float), _CANONICAL_DOMAIN[kind])


def make_rule(kind, n: int) -> QuadratureRule:
    """Build (or fetch from cache) the order-``n`` rule of the given kind.

    Parameters
    ----------
    kind : str
        ``"legendre"``, ``"hermite"`` or ``"laguerre"`` (case-insensitive).
    n : int
        Number of nodes; ``1 <= n <= 200`` (180 for Laguerre, where the
        float64 weights underflow beyond that).
    """
    kind = _normalize_kind(kind)
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise QuadratureError(f"order must be an integer, got {n!r}")
    cap = ORDER_CAP[kind]
    if n < 1 or n > cap:
        raise QuadratureError(
            f"order {n} outside supported range [1, {cap}] for {kind} "
            "(node computation accuracy degrades beyond the cap)"
        )
    return _cached_rule(kind, int(n))


def map_to_interval(rule: QuadratureRule, a: float, b: float) -> QuadratureRule:
    """Affinely transplant a Legendre rule from [-1, 1] onto ``[a, b]``.

    Nodes map as ``t_i = (b - a)/2 * x_i + (a + b)/2`` and weights scale by
    ``(b - a)/2``, so the mapped weights sum to ``b - a``.
    """
    if rule.kind != LEGENDRE:
        raise QuadratureError(
            f"interval mapping is defined for legendre rules, got {rule.kind!r}"
        )
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise QuadratureError("interval endpoints must be finite")
    if a >= b:
        raise QuadratureError(f"need a < b, got a={a!r}, b={b!r}")
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return QuadratureRule(LEGENDRE, rule.order, half * rule.nodes + mid,
                          half * rule.weights, (a, b))


def _evaluate(f, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` at every node, accepting scalar-only callables."""
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        y = np.array([float(f(t)) for t in x])
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise IntegrationError(
            f"integrand returned a non-finite value at node {bad!r}", node=float(bad)
        )
    return y


def integrate_bounded(f, a: float, b: float, n: int) -> float:
    """Approximate ``integral_a^b f(x) dx`` with an n-point mapped Legendre rule."""
    rule = map_to_interval(make_rule(LEGENDRE, n), a, b)
    return float(rule.weights @ _evaluate(f, rule.nodes))


def integrate_shifted_laguerre(f, a: float, n: int) -> float:
    """Approximate ``integral_a^inf f(x) dx`` with an n-point shifted Laguerre rule.

    The rule natively integrates ``e^{-x} g(x)`` on ``[0, inf)``; shifting by
    ``a`` and setting ``g(x) = e^{x} f(x + a)`` yields

        integral_a^inf f(x) dx ~ sum_i w_i e^{x_i} f(x_i + a),

    which is exact whenever ``f`` decays like ``e^{-x}`` times a low-degree
    polynomial and remains accurate for the faster log-normal-type tails
    integrated here.
    """
    a = float(a)
    if not math.isfinite(a):
        raise QuadratureError("shift must be finite")
    rule = make_rule(LAGUERRE, n)
    scaled = rule.weights * np.exp(rule.nodes)
    return float(scaled @ _evaluate(f, rule.nodes + a))
