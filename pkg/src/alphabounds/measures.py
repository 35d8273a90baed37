"""Rényi divergences, Sibson's alpha-mutual information and maximal leakage.

Everything here works on finite alphabets with the counting measure as the
reference measure, so densities are just probability masses. Results are in
nats. ``math.inf`` is a legitimate return value (e.g. ``D_alpha`` for
``alpha > 1`` when ``P`` is not absolutely continuous w.r.t. ``Q``); ``-inf``
is never returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.special import logsumexp

SUM_TOL = 1e-12
# |alpha - 1| below this is treated as alpha = 1
ONE_SNAP = 1e-9


class InvalidDistribution(ValueError):
    pass


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Order:
    """An order ``alpha`` in ``(0, inf]``.

    ``value`` is ``math.inf`` for the infinite order and exactly ``1.0`` for
    the Shannon order. Values within ``ONE_SNAP`` of one are snapped to one.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or v <= 0:
            raise ValueError(f"order must be positive, got {self.value!r}")
        if abs(v - 1.0) < ONE_SNAP:
            v = 1.0
        object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, alpha: "OrderLike") -> "Order":
        if isinstance(alpha, Order):
            return alpha
        if isinstance(alpha, str):
            s = alpha.strip().lower()
            if s in ("inf", "infinity", "+inf", "∞"):
                return cls(math.inf)
            return cls(float(s))
        return cls(float(alpha))

    @property
    def is_one(self) -> bool:
        return self.value == 1.0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def tag(self) -> str:
        if self.is_one:
            return "ONE"
        if self.is_infinite:
            return "INFINITY"
        return "FINITE"

    def __float__(self):
        return self.value

    def __str__(self):
        return "inf" if self.is_infinite else repr(self.value)


OrderLike = Union[Order, float, int, str]

ONE = Order(1.0)
INFINITY = Order(math.inf)


def conjugate(alpha: OrderLike) -> float:
    """Hölder conjugate ``gamma = alpha / (alpha - 1)`` for ``alpha >= 1``."""
    a = Order.of(alpha)
    if a.value < 1:
        raise ValueError(f"conjugate needs alpha >= 1, got {a.value}")
    if a.is_one:
        return math.inf
    if a.is_infinite:
        return 1.0
    return a.value / (a.value - 1.0)


def inverse_conjugate(alpha: OrderLike) -> float:
    """``1/gamma = (alpha - 1)/alpha``, with the limits 0 at one and 1 at infinity."""
    a = Order.of(alpha)
    if a.value < 1:
        raise ValueError(f"conjugate needs alpha >= 1, got {a.value}")
    if a.is_infinite:
        return 1.0
    return (a.value - 1.0) / a.value


@dataclass(frozen=True)
class HolderPair:
    """Two Hölder-conjugate pairs ``(alpha, gamma)`` and ``(alpha', gamma')``."""

    alpha: Order
    alpha_prime: Order

    def __post_init__(self):
        a = Order.of(self.alpha)
        ap = Order.of(self.alpha_prime)
        if a.value < 1 or ap.value < 1:
            raise ValueError("both orders of a Hölder pair must be >= 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "alpha_prime", ap)

    @property
    def gamma(self) -> float:
        return conjugate(self.alpha)

    @property
    def gamma_prime(self) -> float:
        return conjugate(self.alpha_prime)


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------


def _check_mass(mass: np.ndarray, what: str) -> None:
    if mass.size == 0:
        raise InvalidDistribution(f"{what}: empty support")
    if not np.all(np.isfinite(mass)):
        raise InvalidDistribution(f"{what}: non-finite entries")
    if np.any(mass < 0):
        raise InvalidDistribution(f"{what}: negative entries")
    total = float(mass.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise InvalidDistribution(f"{what}: mass sums to {total!r}, not 1")


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability mass on ``{0, ..., k-1}``."""

    mass: np.ndarray

    def __post_init__(self):
        m = np.array(self.mass, dtype=float)
        if m.ndim != 1:
            raise InvalidDistribution("distribution mass must be one-dimensional")
        _check_mass(m, "distribution")
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    @property
    def support_size(self) -> int:
        return self.mass.shape[0]

    @classmethod
    def bernoulli(cls, p: float) -> "FiniteDistribution":
        """Mass ``(1 - p, p)`` on ``{0, 1}``."""
        return cls(np.array([1.0 - p, p]))

    @classmethod
    def uniform(cls, k: int) -> "FiniteDistribution":
        return cls(np.full(k, 1.0 / k))

    def __len__(self):
        return self.support_size

    def __repr__(self):
        return f"FiniteDistribution({self.mass.tolist()})"


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Mass grid on ``X x Y`` (rows index ``x``, columns index ``y``)."""

    mass: np.ndarray

    def __post_init__(self):
        m = np.array(self.mass, dtype=float)
        if m.ndim != 2:
            raise InvalidDistribution("joint mass must be a 2-D grid")
        _check_mass(m, "joint")
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_channel(cls, px, channel) -> "JointDistribution":
        """Joint of an input distribution and a row-stochastic channel ``P(y|x)``."""
        px = np.asarray(getattr(px, "mass", px), dtype=float)
        channel = np.asarray(channel, dtype=float)
        return cls(px[:, None] * channel)

    @classmethod
    def product_of(cls, px, py) -> "JointDistribution":
        px = np.asarray(getattr(px, "mass", px), dtype=float)
        py = np.asarray(getattr(py, "mass", py), dtype=float)
        return cls(np.outer(px, py))

    @property
    def nx(self) -> int:
        return self.mass.shape[0]

    @property
    def ny(self) -> int:
        return self.mass.shape[1]

    @property
    def shape(self):
        return self.mass.shape

    @cached_property
    def px(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @cached_property
    def py(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def marginal_x(self) -> FiniteDistribution:
        return FiniteDistribution(self.px / self.px.sum())

    def marginal_y(self) -> FiniteDistribution:
        return FiniteDistribution(self.py / self.py.sum())

    @cached_property
    def conditional(self) -> np.ndarray:
        """``P(y|x)`` as an ``nx x ny`` array; rows with ``P_X(x) = 0`` are all zero."""
        out = np.zeros_like(self.mass)
        ok = self.px > 0
        out[ok] = self.mass[ok] / self.px[ok, None]
        return out

    def product(self) -> "JointDistribution":
        """The product of the marginals ``P_X P_Y``."""
        return JointDistribution(np.outer(self.px, self.py))

    def garble(self, kernel) -> "JointDistribution":
        """Post-process ``Y`` through a row-stochastic ``ny x k`` kernel."""
        kernel = np.asarray(kernel, dtype=float)
        if kernel.ndim != 2 or kernel.shape[0] != self.ny:
            raise ValueError("garbling kernel must have ny rows")
        if np.any(kernel < 0) or np.any(np.abs(kernel.sum(axis=1) - 1) > SUM_TOL):
            raise ValueError("garbling kernel must be row-stochastic")
        return JointDistribution(self.mass @ kernel)

    def __repr__(self):
        return f"JointDistribution({self.mass.tolist()})"


def _as_mass(d) -> np.ndarray:
    if isinstance(d, (FiniteDistribution, JointDistribution)):
        return d.mass
    m = np.asarray(d, dtype=float)
    _check_mass(m, "distribution")
    return m


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------


def log_power_sum(p: np.ndarray, q: np.ndarray, alpha: float) -> np.ndarray:
    """``ln sum_i p_i^alpha q_i^(1 - alpha)`` along the last axis.

    This is the single place where zero-mass conventions live:

    * cells with ``p_i = 0`` contribute nothing;
    * cells with ``p_i > 0, q_i = 0`` contribute nothing for ``alpha < 1`` and
      make the result ``+inf`` for ``alpha > 1``.

    ``p`` and ``q`` broadcast against each other, so ``q`` may carry leading
    batch axes. An empty sum gives ``-inf``.
    """
    p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    live = p > 0
    orphan = live & (q <= 0)
    ok = live & ~orphan
    with np.errstate(divide="ignore", invalid="ignore"):
        # ln p + (alpha - 1) ln(p/q): exact when p == q
        log_p = np.log(np.where(ok, p, 1.0))
        terms = np.where(ok, log_p + (alpha - 1.0) * (log_p - np.log(np.where(ok, q, 1.0))), -np.inf)
        out = logsumexp(terms, axis=-1)
    if alpha > 1:
        out = np.where(orphan.any(axis=-1), np.inf, out)
    return out


# ---------------------------------------------------------------------------
# divergences
# ---------------------------------------------------------------------------


def renyi_divergence(p, q, alpha: OrderLike) -> float:
    """Rényi divergence ``D_alpha(P || Q)`` in nats.

    Parameters
    ----------
    p, q : FiniteDistribution, JointDistribution or array_like
        Distributions on the same finite alphabet (any shape, compared cell-wise).
    alpha : Order, float or str
        Order in ``(0, inf]``; 1 gives the KL divergence, ``"inf"`` the
        max-divergence ``ln max p/q``.
    """
    a = Order.of(alpha)
    p = _as_mass(p).ravel()
    q = _as_mass(q).ravel()
    if p.shape != q.shape:
        raise ValueError(f"support size mismatch: {p.size} vs {q.size}")
    live = p > 0
    if a.is_one:
        if np.any(q[live] == 0):
            return math.inf
        val = float(np.sum(p[live] * (np.log(p[live]) - np.log(q[live]))))
        return max(val, 0.0)
    if a.is_infinite:
        if np.any(q[live] == 0):
            return math.inf
        return max(float(np.max(np.log(p[live]) - np.log(q[live]))), 0.0)
    lps = float(log_power_sum(p, q, a.value))
    if math.isinf(lps):
        # +inf for alpha > 1 (orphan mass), -inf for alpha < 1 (disjoint supports)
        return math.inf
    return max(lps / (a.value - 1.0), 0.0)


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence in nats."""
    return renyi_divergence(p, q, ONE)


def mutual_information(joint: JointDistribution) -> float:
    """Shannon mutual information ``I(X; Y)`` in nats."""
    return renyi_divergence(joint.mass, np.outer(joint.px, joint.py), ONE)


def maximal_leakage(joint: JointDistribution) -> float:
    """Maximal leakage ``ln sum_y max_{x: P_X(x) > 0} P(y|x)``."""
    cond = joint.conditional[joint.px > 0]
    col_max = cond.max(axis=0)[joint.py > 0]
    return max(float(np.log(col_max.sum())), 0.0)


def _log_sibson_terms(joint: JointDistribution, alpha: float) -> np.ndarray:
    # ln A_y, A_y = sum_x P_X(x) P(y|x)^alpha = sum_x J(x,y)^alpha P_X(x)^(1-alpha)
    return log_power_sum(joint.mass.T, joint.px, alpha)


def sibson_mi(joint: JointDistribution, alpha: OrderLike) -> float:
    """Sibson's mutual information of order ``alpha`` (closed form), in nats.

    ``I_alpha = alpha/(alpha-1) * ln sum_y (sum_x P_X(x) P(y|x)^alpha)^(1/alpha)``;
    order 1 gives Shannon MI and ``inf`` gives maximal leakage.
    """
    a = Order.of(alpha)
    if a.is_one:
        return mutual_information(joint)
    if a.is_infinite:
        return maximal_leakage(joint)
    log_a = _log_sibson_terms(joint, a.value)
    val = float(logsumexp(log_a / a.value)) * a.value / (a.value - 1.0)
    return max(val, 0.0)


def optimal_output_distribution(joint: JointDistribution, alpha: OrderLike) -> FiniteDistribution:
    """Minimiser ``Q*`` of ``D_alpha(P_XY || P_X Q)`` over output distributions."""
    a = Order.of(alpha)
    if a.is_one or a.is_infinite:
        raise ValueError("optimal output distribution is defined here for finite alpha != 1")
    w = _log_sibson_terms(joint, a.value) / a.value
    w = np.exp(w - logsumexp(w))
    return FiniteDistribution(w / w.sum())


# ---------------------------------------------------------------------------
# minimisation oracle
# ---------------------------------------------------------------------------

ORACLE_MAX_NY = 5
_COARSE_POINTS = 20000


def _compositions(total: int, parts: int):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        row = []
        for c in cuts:
            row.append(c - prev - 1)
            prev = c
        row.append(total + parts - 2 - prev)
        yield row


def sibson_mi_minimization_oracle(
    joint: JointDistribution, alpha: OrderLike, resolution: int = 1000, return_argmin: bool = False
):
    """``min_Q D_alpha(P_XY || P_X Q)`` by direct search over the output simplex.

    Deterministic and seedless: an exhaustive coarse lattice, a zooming
    lattice search down to step ``1/resolution``, then a pattern search over
    mass transfers with the step halved down to ``1/resolution**2``. The
    objective is the Rényi divergence between the full joint and ``P_X Q``
    evaluated cell by cell; it never uses the closed form.
    """
    a = Order.of(alpha)
    if a.is_one or a.is_infinite:
        raise ValueError("oracle needs finite alpha != 1")
    if resolution < 50:
        raise ValueError("resolution must be >= 50")
    ny = joint.ny
    if ny > ORACLE_MAX_NY:
        raise ValueError(f"oracle handles ny <= {ORACLE_MAX_NY}, got {ny}")
    av = a.value
    pxy = joint.mass.ravel()
    px = joint.px

    def objective(qs: np.ndarray) -> np.ndarray:
        # qs: (k, ny) -> D_alpha(P_XY || P_X q) for each row
        prod = (px[None, :, None] * qs[:, None, :]).reshape(len(qs), -1)
        lps = log_power_sum(pxy, prod, av)
        with np.errstate(invalid="ignore"):
            d = lps / (av - 1.0)
        return np.where(np.isinf(lps), np.inf, d)

    if ny == 1:
        q = np.ones((1, 1))
        val = float(objective(q)[0])
        return (val, FiniteDistribution(q[0])) if return_argmin else val

    # coarse exhaustive lattice
    coarse = 1
    while math.comb(2 * coarse + ny - 1, ny - 1) <= _COARSE_POINTS and 2 * coarse <= resolution:
        coarse *= 2
    pts = np.array(list(_compositions(coarse, ny)), dtype=float) / coarse
    vals = objective(pts)
    best = pts[int(np.argmin(vals))]
    best_val = float(np.min(vals))

    moves = np.array([v for v in itertools.product((-1, 0, 1), repeat=ny) if sum(v) == 0 and any(v)], dtype=float)

    def pattern_search(start, start_val, step, floor):
        x, fx = start, start_val
        while step >= floor * (1 - 1e-12):
            while True:
                cand = x[None, :] + step * moves
                cand = cand[np.all(cand >= -1e-15, axis=1)]
                cand = np.clip(cand, 0.0, None)
                cv = objective(cand)
                i = int(np.argmin(cv))
                if cv[i] < fx:
                    x, fx = cand[i], float(cv[i])
                else:
                    break
            step /= 2
        return x, fx

    # lattice zoom: steps 1/coarse, 1/(2 coarse), ... down to 1/resolution
    step = 1.0 / coarse
    best, best_val = pattern_search(best, best_val, step, 1.0 / resolution)
    # snap to the 1/resolution lattice before the fine stage
    snapped = np.floor(best * resolution) / resolution
    snapped[int(np.argmax(best))] += 1.0 - snapped.sum()
    sv = float(objective(snapped[None, :])[0])
    if sv <= best_val:
        best, best_val = snapped, sv
    best, best_val = pattern_search(best, best_val, 1.0 / resolution, 1.0 / resolution**2)

    best = np.clip(best, 0.0, None)
    best = best / best.sum()
    val = max(float(objective(best[None, :])[0]), 0.0)
    if return_argmin:
        return val, FiniteDistribution(best)
    return val
