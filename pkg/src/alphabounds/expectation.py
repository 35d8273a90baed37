"""From exponential tails to bounds on the expected generalization error."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .learning import Learner, LearningProblem, empirical_risks, true_risks
from .measures import conjugate, Order, OrderLike

LN2 = math.log(2.0)


@dataclass(frozen=True)
class TailBoundSpec:
    """Tail ``P(|X - center| >= eta) <= 2 b exp(-eta^2 / a^2)``.

    The tail-to-mean lemma wants ``b >= e``. With ``strict=True`` a smaller
    ``b`` is rejected; with ``strict=False`` it is kept and ``b_below_e`` is
    set so callers can see the hypothesis was not met.
    """

    a: float
    b: float
    center: float = 0.0
    strict: bool = True

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("a must be nonnegative")
        if self.strict and self.b < math.e:
            raise ValueError(f"b must be >= e, got {self.b}")

    @property
    def b_below_e(self) -> bool:
        return self.b < math.e

    @classmethod
    def relaxed(cls, a: float, b: float, center: float = 0.0) -> "TailBoundSpec":
        return cls(a, b, center, strict=False)


def tail_to_expectation(spec: TailBoundSpec) -> float:
    """``a (sqrt(ln 2b) + 1 / (2 sqrt(ln 2b)))``, the bound on ``E|X - center|``."""
    log2b = math.log(2.0 * spec.b) if spec.b > 0 else -math.inf
    if log2b <= 0:
        raise ValueError(f"ln(2b) = {log2b} <= 0; the bound is undefined for b = {spec.b}")
    if spec.a == 0:
        return 0.0
    r = math.sqrt(log2b)
    return spec.a * (r + 1.0 / (2.0 * r))


def _midpoint(f, lo, hi, panels):
    h = (hi - lo) / panels
    x = lo + h * (np.arange(panels) + 0.5)
    return float(f(x).sum() * h)


def lemma9_numeric_check(spec: TailBoundSpec, resolution: int = 1000, rtol: float = 1e-10):
    """Integrate ``min(1, 2b exp(-eta^2/a^2))`` over ``[0, inf)`` numerically.

    Composite midpoint rule starting from ``resolution`` panels, halving the
    panel width until successive estimates differ by less than ``rtol``. The
    range is truncated where the integrand falls below 1e-15.

    Returns ``(integral, bound)``.
    """
    if resolution < 100:
        raise ValueError("resolution must be >= 100")
    if not spec.a > 0:
        raise ValueError("numeric check needs a > 0")
    a, b = spec.a, spec.b

    def f(eta):
        return np.minimum(1.0, 2.0 * b * np.exp(-(eta * eta) / (a * a)))

    top = a * math.sqrt(max(math.log(2.0 * b * 1e15), 0.0))
    panels = resolution
    prev = _midpoint(f, 0.0, top, panels)
    while True:
        panels *= 2
        cur = _midpoint(f, 0.0, top, panels)
        if abs(cur - prev) < rtol or panels > 1 << 26:
            break
        prev = cur
    return cur, tail_to_expectation(spec)


def theorem10_tail_spec(n: int, sigma: float, alpha: OrderLike, i_alpha: float) -> TailBoundSpec:
    """Tail parameters ``a = sqrt(2 gamma sigma^2 / n)``, ``b = 2^(1/gamma - 1) exp(I_alpha / gamma)``."""
    gamma = _finite_gamma(alpha)
    a = math.sqrt(2.0 * gamma * sigma * sigma / n)
    b = 2.0 ** (1.0 / gamma - 1.0) * math.exp(i_alpha / gamma)
    return TailBoundSpec.relaxed(a, b)


def _finite_gamma(alpha):
    a = Order.of(alpha)
    if a.value <= 1:
        raise ValueError("alpha must be > 1 (gamma must be finite)")
    return conjugate(a)


def expected_generr_bound(n: int, sigma: float, alpha: OrderLike, i_alpha: float) -> float:
    """Bound on ``E|L_S(H) - L_P(H)|`` from ``I_alpha(S; H)`` and a sub-Gaussian loss.

    ``sqrt(2 sigma^2 gamma / n) * (sqrt(c) + 1 / (2 sqrt(c)))`` with
    ``c = (ln 2 + I_alpha) / gamma``. Whether ``b >= e`` holds for the
    underlying tail is reported by :func:`theorem10_tail_spec`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if i_alpha < 0:
        raise ValueError("information must be nonnegative")
    gamma = _finite_gamma(alpha)
    if math.isinf(i_alpha):
        return math.inf
    c = (LN2 + i_alpha) / gamma
    return math.sqrt(2.0 * sigma * sigma * gamma / n) * (math.sqrt(c) + 1.0 / (2.0 * math.sqrt(c)))


def leakage_expected_bound(n: int, leakage: float) -> float:
    """0-1 loss version: ``(1/sqrt(2n)) (sqrt(ln 2 + L) + 1 / (2 sqrt(ln 2 + L)))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if leakage < 0:
        raise ValueError("leakage must be nonnegative")
    c = LN2 + leakage
    return (math.sqrt(c) + 1.0 / (2.0 * math.sqrt(c))) / math.sqrt(2.0 * n)


def exact_expected_generr(problem: LearningProblem, learner: Learner, exact: bool = False):
    """``sum_{s,h} P(s) P(h|s) |L_P(h) - L_s(h)|`` by enumeration.

    With ``exact=True`` the sum is carried out in rational arithmetic on the
    exact binary values of the inputs and a ``Fraction`` is returned.
    """
    space = learner.space
    if not exact:
        gaps = np.abs(true_risks(problem)[None, :] - empirical_risks(problem, space))
        return float(np.sum(space.probs[:, None] * learner.rows * gaps))

    p = [Fraction(float(v)) for v in problem.data_dist.mass]
    loss = [[Fraction(float(v)) for v in row] for row in problem.loss]
    true = [sum(l * q for l, q in zip(row, p)) for row in loss]
    n = problem.n
    total = Fraction(0)
    if space.collapsed:
        # type-class weights are floats; use them as-is
        probs = [Fraction(float(v)) for v in space.probs]
    else:
        probs = []
        for s in space.datasets:
            w = Fraction(1)
            for z in s:
                w *= p[z]
            probs.append(w)
    for i, s in enumerate(space.datasets):
        row = learner.rows[i]
        for h in np.flatnonzero(row):
            emp = sum((loss[h][z] for z in s), Fraction(0)) / n
            total += probs[i] * Fraction(float(row[h])) * abs(true[h] - emp)
    return total
