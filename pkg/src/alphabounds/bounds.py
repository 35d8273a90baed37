"""Change-of-measure bounds on ``P_XY(E)`` in terms of ``P_X P_Y``.

All bounds are evaluated in the log domain so that orders up to ~1e4 stay
finite. A right-hand side of ``+inf`` is a valid (vacuous) bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .measures import (
    HolderPair,
    JointDistribution,
    Order,
    OrderLike,
    inverse_conjugate,
    maximal_leakage,
    renyi_divergence,
    sibson_mi,
)

HOLDS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Event:
    """A subset of ``X x Y`` given by a 0/1 indicator grid."""

    indicator: np.ndarray

    def __post_init__(self):
        ind = np.asarray(self.indicator)
        if ind.ndim != 2:
            raise ValueError("event indicator must be a 2-D grid")
        if not np.all((ind == 0) | (ind == 1)):
            raise ValueError("event indicator entries must be 0 or 1")
        ind = ind.astype(bool)
        ind.setflags(write=False)
        object.__setattr__(self, "indicator", ind)

    @classmethod
    def empty(cls, nx, ny):
        return cls(np.zeros((nx, ny), dtype=bool))

    @classmethod
    def full(cls, nx, ny):
        return cls(np.ones((nx, ny), dtype=bool))

    @classmethod
    def diagonal(cls, k):
        return cls(np.eye(k, dtype=bool))

    @property
    def nx(self):
        return self.indicator.shape[0]

    @property
    def ny(self):
        return self.indicator.shape[1]

    def fiber(self, y: int) -> np.ndarray:
        """Indices ``x`` with ``(x, y)`` in the event."""
        return np.flatnonzero(self.indicator[:, y])


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    name: str
    parameters: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + HOLDS_TOL


def _check_dims(joint: JointDistribution, event: Event) -> None:
    if joint.shape != event.indicator.shape:
        raise ValueError(f"event shape {event.indicator.shape} does not match joint shape {joint.shape}")


def event_probability(joint: JointDistribution, event: Event) -> float:
    _check_dims(joint, event)
    return float(joint.mass[event.indicator].sum())


def product_probability(joint: JointDistribution, event: Event) -> float:
    """``P_X P_Y(E)``."""
    _check_dims(joint, event)
    return float(joint.px @ event.indicator @ joint.py)


def fiber_probabilities(joint: JointDistribution, event: Event) -> np.ndarray:
    """``P_X(E_y)`` for every ``y``."""
    _check_dims(joint, event)
    return joint.px @ event.indicator


def fiber_probability(joint: JointDistribution, event: Event, y: int) -> float:
    if not 0 <= y < joint.ny:
        raise IndexError(f"y={y} out of range for ny={joint.ny}")
    return float(fiber_probabilities(joint, event)[y])


def esssup_fiber(joint: JointDistribution, event: Event) -> float:
    """Largest fiber probability over outputs with positive mass."""
    fibers = fiber_probabilities(joint, event)[joint.py > 0]
    return float(fibers.max())


def _logsumexp(x: np.ndarray, axis=None):
    """Plain-numpy log-sum-exp for the hot path.

    ``scipy.special.logsumexp`` spends most of its time in array-API dispatch
    for the tiny arrays used here. Rows that are all ``-inf`` give ``-inf``.
    """
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis) if axis is not None else float(out.ravel()[0])


def _log_lp_norm(log_values: np.ndarray, weights: np.ndarray, p: float) -> float:
    """``ln ||v||_p`` under the probability weights, given ``ln v``."""
    if math.isinf(p):
        return float(np.max(log_values))
    with np.errstate(divide="ignore"):
        return _logsumexp(np.log(weights) + p * log_values) / p


def _safe_exp(x: float) -> float:
    if math.isnan(x):
        return math.inf
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def theorem1_bound(joint: JointDistribution, event: Event, pair: HolderPair) -> BoundReport:
    """General two-exponent bound on ``P_XY(E)``.

    ``rhs = ||P_X(E_Y)^(1/gamma)||_{gamma'} * ||E_X[r^alpha]^(1/alpha)||_{alpha'}``
    where norms are under ``P_Y`` and ``r = dP_XY / d(P_X P_Y)``. Zero powers
    follow ``0^0 = 1``, so ``alpha = 1`` makes the first factor 1.
    """
    _check_dims(joint, event)
    if not isinstance(pair, HolderPair):
        pair = HolderPair(*pair)
    a, ap = pair.alpha, pair.alpha_prime
    live_y = joint.py > 0
    py = joint.py[live_y]
    px = joint.px
    mass = joint.mass[:, live_y]
    inv_gamma = inverse_conjugate(a)

    fibers = (px @ event.indicator)[live_y]
    with np.errstate(divide="ignore"):
        if inv_gamma == 0.0:
            log_t = np.zeros_like(fibers)
        else:
            log_t = inv_gamma * np.log(fibers)
    log_first = _log_lp_norm(log_t, py, pair.gamma_prime)

    live_x = px > 0
    with np.errstate(divide="ignore"):
        log_r = np.log(mass[live_x]) - np.log(px[live_x])[:, None] - np.log(py)[None, :]
    if a.is_infinite:
        log_s = log_r.max(axis=0)
    else:
        log_s = _logsumexp(np.log(px[live_x])[:, None] + a.value * log_r, axis=0) / a.value
    log_second = _log_lp_norm(log_s, py, ap.value)

    lhs = event_probability(joint, event)
    rhs = _safe_exp(log_first + log_second)
    return BoundReport(
        lhs=lhs,
        rhs=rhs,
        name="theorem1",
        parameters={"alpha": a.value, "alpha_prime": ap.value, "gamma": pair.gamma, "gamma_prime": pair.gamma_prime},
    )


def corollary_alpha_div_bound(joint: JointDistribution, event: Event, alpha: OrderLike) -> BoundReport:
    """``(P_X P_Y(E))^(1/gamma) * exp(D_alpha(P_XY || P_X P_Y) / gamma)``."""
    a = Order.of(alpha)
    if a.value < 1:
        raise ValueError("alpha must be >= 1")
    lhs = event_probability(joint, event)
    q = product_probability(joint, event)
    inv_gamma = inverse_conjugate(a)
    if inv_gamma == 0.0:
        rhs = 1.0
    else:
        d = renyi_divergence(joint.mass, np.outer(joint.px, joint.py), a)
        if q <= 0:
            rhs = 0.0 if not math.isinf(d) else math.inf
        else:
            rhs = _safe_exp(inv_gamma * (math.log(q) + d))
    return BoundReport(lhs=lhs, rhs=rhs, name="alpha_div", parameters={"alpha": a.value})


def corollary_sibson_bound(
    joint: JointDistribution, event: Event, alpha: OrderLike, info: Optional[float] = None
) -> BoundReport:
    """``exp((1/gamma) * (I_alpha(X;Y) + ln esssup_Y P_X(E_Y)))``.

    ``info`` may carry a precomputed ``I_alpha``. The infinite order is the
    maximal-leakage bound.
    """
    a = Order.of(alpha)
    if a.value < 1:
        raise ValueError("alpha must be >= 1")
    if a.is_infinite:
        return corollary_leakage_bound(joint, event, info=info)
    lhs = event_probability(joint, event)
    sup = esssup_fiber(joint, event)
    inv_gamma = inverse_conjugate(a)
    if inv_gamma == 0.0:
        rhs = 1.0
    else:
        i_a = sibson_mi(joint, a) if info is None else info
        # 0 * inf cannot arise on finite alphabets (I_alpha < inf); keep it vacuous if it did
        if sup <= 0:
            rhs = math.inf if math.isinf(i_a) else 0.0
        else:
            rhs = _safe_exp(inv_gamma * (i_a + math.log(sup)))
    return BoundReport(lhs=lhs, rhs=rhs, name="sibson", parameters={"alpha": a.value})


def corollary_leakage_bound(joint: JointDistribution, event: Event, info: Optional[float] = None) -> BoundReport:
    """``esssup_Y P_X(E_Y) * exp(L(X -> Y))``."""
    lhs = event_probability(joint, event)
    sup = esssup_fiber(joint, event)
    leak = maximal_leakage(joint) if info is None else info
    rhs = 0.0 if sup <= 0 and not math.isinf(leak) else sup * _safe_exp(leak)
    return BoundReport(lhs=lhs, rhs=rhs, name="leakage", parameters={"alpha": math.inf})


BOUND_KINDS = ("sibson", "alpha_div")


def best_order(joint: JointDistribution, event: Event, grid: Iterable[OrderLike], bound_kind: str = "sibson"):
    """Grid order with the smallest right-hand side; ties go to the smaller order.

    Returns ``(order, report)``.
    """
    orders = sorted({Order.of(g) for g in grid}, key=lambda o: o.value)
    if not orders:
        raise ValueError("empty order grid")
    if bound_kind == "sibson":
        fn = corollary_sibson_bound
    elif bound_kind == "alpha_div":
        fn = corollary_alpha_div_bound
    else:
        raise ValueError(f"unknown bound kind {bound_kind!r}")
    best = None
    for o in orders:
        rep = fn(joint, event, o)
        if best is None or rep.rhs < best[1].rhs - 1e-12:
            best = (o, rep)
    return best
