"""Finite learning problems, learners as channels, and generalization bounds.

A learner is a row-stochastic matrix ``P(h | s)`` over an explicitly
enumerated dataset space, so the joint over (dataset, hypothesis) and every
generalization event can be evaluated exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .bounds import Event
from .measures import (
    SUM_TOL,
    FiniteDistribution,
    JointDistribution,
    Order,
    OrderLike,
    conjugate,
    inverse_conjugate,
)

DEFAULT_CAP = 10**6
LN2 = math.log(2.0)


class CapExceeded(ValueError):
    pass


class NotExchangeable(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LearningProblem:
    """Data distribution on ``Z = {0..z_size-1}``, ``n`` i.i.d. draws, and a loss table.

    ``loss[h, z]`` is the loss of hypothesis ``h`` on point ``z``. ``sigma`` is
    the sub-Gaussian parameter of ``loss(h, Z)``; 1/2 is correct for any loss
    with values in [0, 1] and is the default.
    """

    data_dist: FiniteDistribution
    n: int
    loss: np.ndarray
    sigma: float = 0.5
    sigma_asserted: bool = False

    def __post_init__(self):
        if not isinstance(self.data_dist, FiniteDistribution):
            object.__setattr__(self, "data_dist", FiniteDistribution(self.data_dist))
        loss = np.array(self.loss, dtype=float)
        if loss.ndim != 2 or loss.shape[1] != self.data_dist.support_size:
            raise ValueError(f"loss must be h_size x z_size={self.data_dist.support_size}, got shape {loss.shape}")
        if not np.all(np.isfinite(loss)):
            raise ValueError("loss entries must be finite")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.sigma_asserted and (loss.min() < 0 or loss.max() > 1):
            raise ValueError("losses outside [0, 1] need an explicit sigma (sigma_asserted=True)")
        loss.setflags(write=False)
        object.__setattr__(self, "loss", loss)
        object.__setattr__(self, "n", int(self.n))

    @property
    def z_size(self) -> int:
        return self.data_dist.support_size

    @property
    def h_size(self) -> int:
        return self.loss.shape[0]

    @property
    def is_zero_one(self) -> bool:
        return bool(np.all((self.loss == 0) | (self.loss == 1)))


def constant_predictor_problem(p: float = 0.5, n: int = 6) -> LearningProblem:
    """Binary labels ~ Bern(p) with the two constant predictors under 0-1 loss.

    Hypothesis 0 predicts label 0, hypothesis 1 predicts label 1.
    """
    return LearningProblem(FiniteDistribution.bernoulli(p), n, np.array([[0.0, 1.0], [1.0, 0.0]]))


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DatasetSpace:
    """Enumerated datasets with their probabilities.

    In collapsed mode each row is the sorted representative of a type class
    and carries the total (multinomial) probability of the class.
    """

    datasets: np.ndarray
    probs: np.ndarray
    collapsed: bool = False

    def __len__(self):
        return self.datasets.shape[0]

    @property
    def distribution(self) -> FiniteDistribution:
        return FiniteDistribution(self.probs)


def _full_datasets(z: int, n: int) -> np.ndarray:
    idx = np.arange(z**n)
    powers = z ** np.arange(n - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % z


def dataset_space(problem: LearningProblem, collapse: bool = False, cap: int = DEFAULT_CAP) -> DatasetSpace:
    """All ``z_size**n`` datasets in lexicographic order (or their type classes)."""
    z, n = problem.z_size, problem.n
    p = problem.data_dist.mass
    if collapse:
        n_types = math.comb(n + z - 1, z - 1)
        if n_types > cap:
            raise CapExceeded(f"{n_types} dataset types exceed cap {cap}")
        data = np.array(list(itertools.combinations_with_replacement(range(z), n)), dtype=int).reshape(-1, n)
        counts = np.stack([(data == k).sum(axis=1) for k in range(z)], axis=1)
        log_multi = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1)
        with np.errstate(divide="ignore"):
            log_p = np.where(counts > 0, counts * np.log(np.where(p > 0, p, 1.0))[None, :], 0.0)
        log_p = np.where((counts > 0) & (p[None, :] == 0), -np.inf, log_p).sum(axis=1)
        probs = np.exp(log_multi + log_p)
        return DatasetSpace(data, probs, collapsed=True)
    if z**n > cap:
        raise CapExceeded(f"{z}**{n} = {z**n} datasets exceed cap {cap}")
    data = _full_datasets(z, n)
    probs = np.prod(p[data], axis=1)
    return DatasetSpace(data, probs)


def empirical_risk(problem: LearningProblem, h: int, dataset) -> float:
    """Average loss of hypothesis ``h`` on ``dataset``."""
    if not 0 <= h < problem.h_size:
        raise IndexError(f"hypothesis {h} out of range")
    dataset = np.asarray(dataset, dtype=int)
    if dataset.shape != (problem.n,):
        raise ValueError(f"dataset must have length n={problem.n}")
    if dataset.min() < 0 or dataset.max() >= problem.z_size:
        raise IndexError("dataset point out of range")
    return float(problem.loss[h, dataset].mean())


def empirical_risks(problem: LearningProblem, space: DatasetSpace) -> np.ndarray:
    """``L_S(h)`` for every dataset (rows) and hypothesis (columns)."""
    return problem.loss[:, space.datasets].mean(axis=2).T


def true_risk(problem: LearningProblem, h: int) -> float:
    if not 0 <= h < problem.h_size:
        raise IndexError(f"hypothesis {h} out of range")
    return float(problem.loss[h] @ problem.data_dist.mass)


def true_risks(problem: LearningProblem) -> np.ndarray:
    return problem.loss @ problem.data_dist.mass


# ---------------------------------------------------------------------------
# learners
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Learner:
    """Channel ``P(h | s)`` over the datasets of ``space``.

    Deterministic learners are stored as one-hot rows.
    """

    rows: np.ndarray
    space: DatasetSpace
    name: str = "learner"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != len(self.space):
            raise ValueError(f"learner needs one row per dataset ({len(self.space)}), got shape {rows.shape}")
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > SUM_TOL):
            raise ValueError("learner rows must be probability distributions")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_map(cls, mapping, h_size: int, space: DatasetSpace, name: str = "deterministic") -> "Learner":
        mapping = np.asarray(mapping, dtype=int)
        if mapping.shape != (len(space),):
            raise ValueError("deterministic map needs one hypothesis index per dataset")
        if mapping.min() < 0 or mapping.max() >= h_size:
            raise IndexError("hypothesis index out of range in map")
        rows = np.zeros((len(space), h_size))
        rows[np.arange(len(space)), mapping] = 1.0
        return cls(rows, space, name)

    @property
    def h_size(self) -> int:
        return self.rows.shape[1]

    @property
    def deterministic(self) -> bool:
        return bool(np.all((self.rows == 0) | (self.rows == 1)))


def _space(problem, space, cap=DEFAULT_CAP):
    return dataset_space(problem, cap=cap) if space is None else space


def erm_learner(
    problem: LearningProblem, tie_break: str = "lowest_index", space: Optional[DatasetSpace] = None
) -> Learner:
    """Empirical risk minimiser.

    ``tie_break="lowest_index"`` picks the first minimiser; ``"uniform_random"``
    spreads mass uniformly over all minimisers.
    """
    space = _space(problem, space)
    risks = empirical_risks(problem, space)
    argmin = risks <= risks.min(axis=1, keepdims=True) + 1e-12
    if tie_break == "lowest_index":
        rows = np.zeros_like(risks)
        rows[np.arange(len(space)), argmin.argmax(axis=1)] = 1.0
    elif tie_break == "uniform_random":
        rows = argmin / argmin.sum(axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown tie_break {tie_break!r}")
    return Learner(rows, space, "erm", {"tie_break": tie_break})


def gibbs_learner(problem: LearningProblem, temperature: float, space: Optional[DatasetSpace] = None) -> Learner:
    """Stochastic learner with ``P(h|s)`` proportional to ``exp(-L_s(h) / temperature)``."""
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    space = _space(problem, space)
    logits = -empirical_risks(problem, space) / temperature
    rows = np.exp(logits - logsumexp(logits, axis=1, keepdims=True))
    rows /= rows.sum(axis=1, keepdims=True)
    return Learner(rows, space, "gibbs", {"temperature": temperature})


def constant_learner(problem: LearningProblem, h: int = 0, space: Optional[DatasetSpace] = None) -> Learner:
    space = _space(problem, space)
    return Learner.from_map(np.full(len(space), h), problem.h_size, space, "constant")


def random_learner(problem: LearningProblem, seed: int, space: Optional[DatasetSpace] = None) -> Learner:
    """Deterministic learner drawn uniformly at random from all maps, fixed by ``seed``."""
    space = _space(problem, space)
    rng = np.random.default_rng(seed)
    mapping = rng.integers(problem.h_size, size=len(space))
    return Learner.from_map(mapping, problem.h_size, space, "random")


def collapse_learner(problem: LearningProblem, learner: Learner) -> Learner:
    """Re-express a learner on the type-class space after checking exchangeability.

    Every dataset's row is compared with the row of its sorted permutation; a
    mismatch raises ``NotExchangeable``.
    """
    space = learner.space
    if space.collapsed:
        return learner
    z, n = problem.z_size, problem.n
    powers = z ** np.arange(n - 1, -1, -1)
    canon = np.sort(space.datasets, axis=1) @ powers
    diff = np.abs(learner.rows - learner.rows[canon]).max()
    if diff > 1e-12:
        raise NotExchangeable(f"learner rows differ across permuted datasets (max diff {diff:.3g})")
    collapsed = dataset_space(problem, collapse=True)
    type_idx = collapsed.datasets @ powers
    return Learner(learner.rows[type_idx], collapsed, learner.name, dict(learner.params))


def build_joint(problem: LearningProblem, learner: Learner) -> JointDistribution:
    """Joint over (dataset, hypothesis): ``P^n(s) * P(h|s)``."""
    if learner.h_size != problem.h_size:
        raise ValueError("learner and problem disagree on the number of hypotheses")
    return JointDistribution(learner.space.probs[:, None] * learner.rows)


def generalization_event(problem: LearningProblem, eta: float, space: DatasetSpace) -> Event:
    """``{(s, h) : |L_P(h) - L_s(h)| > eta}``."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    gap = np.abs(true_risks(problem)[None, :] - empirical_risks(problem, space))
    return Event(gap > eta)


def hypothesis_fiber_probabilities(problem: LearningProblem, eta: float, space: DatasetSpace) -> np.ndarray:
    """``P_S(E_h)`` for every hypothesis, regardless of whether the learner outputs it."""
    event = generalization_event(problem, eta, space)
    return space.probs @ event.indicator


# ---------------------------------------------------------------------------
# concentration and generalization bounds
# ---------------------------------------------------------------------------


def _check_n_eta(n, eta):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not eta > 0:
        raise ValueError("eta must be positive")


def mcdiarmid_fiber_bound(n: int, eta: float) -> float:
    """``2 exp(-2 n eta^2)``: bounded-differences tail for a 0-1 empirical risk."""
    _check_n_eta(n, eta)
    return 2.0 * math.exp(-2.0 * n * eta * eta)


def hoeffding_fiber_bound(n: int, eta: float, sigma: float) -> float:
    """``2 exp(-n eta^2 / (2 sigma^2))``."""
    _check_n_eta(n, eta)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return 2.0 * math.exp(-n * eta * eta / (2.0 * sigma * sigma))


def _exp_or_inf(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def cor7_bound(i_alpha: float, alpha: OrderLike, n: int, eta: float, sigma: float) -> float:
    """``exp((1/gamma) (I_alpha + ln 2 - n eta^2 / (2 sigma^2)))``; 1 at ``alpha = 1``."""
    _check_n_eta(n, eta)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if i_alpha < 0:
        raise ValueError("information must be nonnegative")
    inv_gamma = inverse_conjugate(alpha)
    if inv_gamma == 0.0:
        return 1.0
    return _exp_or_inf(inv_gamma * (i_alpha + LN2 - n * eta * eta / (2.0 * sigma * sigma)))


def cor5_bound(i_alpha: float, alpha: OrderLike, n: int, eta: float) -> float:
    """``exp((1/gamma) (I_alpha + ln 2 - 2 n eta^2))`` for 0-1 losses.

    At ``alpha = 1`` the exponent vanishes and the (vacuous) value 1 is returned.
    """
    _check_n_eta(n, eta)
    if i_alpha < 0:
        raise ValueError("information must be nonnegative")
    inv_gamma = inverse_conjugate(alpha)
    if inv_gamma == 0.0:
        return 1.0
    return _exp_or_inf(inv_gamma * (i_alpha + LN2 - 2.0 * n * eta * eta))


def sample_complexity_bound(i_alpha: float, alpha: OrderLike, eta: float, delta: float):
    """Smallest integer ``m >= (I_alpha + ln 2 + gamma ln(1/delta)) / (2 eta^2)``.

    Returns ``math.inf`` at ``alpha = 1`` where ``gamma`` is infinite.
    """
    if not 0 < eta < 1 or not 0 < delta < 1:
        raise ValueError("eta and delta must lie in (0, 1)")
    a = Order.of(alpha)
    if a.value < 1:
        raise ValueError("alpha must be >= 1")
    gamma = conjugate(a)
    if math.isinf(gamma) or math.isinf(i_alpha):
        return math.inf
    return int(math.ceil((i_alpha + LN2 + gamma * math.log(1.0 / delta)) / (2.0 * eta * eta)))


# Robust/adaptive columns of the comparison table, verbatim.
TABLE_META = {
    "eps-DP": ("Yes", "Yes"),
    "MI": ("Yes", "Yes"),
    "Maximal Leakage": ("Yes", "Yes"),
    "alpha-Sibson MI": ("Yes", "Unknown"),
    "VC-Dim K": ("", ""),
}


@dataclass(frozen=True)
class TableRow:
    name: str
    robust: str
    adaptive: str
    bound: float
    sample_complexity: float
    valid: Optional[bool] = None


def baseline_table(
    n: int,
    eta: float,
    delta: float,
    mi: Optional[float] = None,
    leakage: Optional[float] = None,
    i_alpha: Optional[float] = None,
    alpha: Optional[OrderLike] = None,
    vc_K: Optional[float] = None,
    dp_epsilon: Optional[float] = None,
) -> list:
    """Rows of the comparison table for whichever measures are supplied.

    The beta-stability row is not produced (its rate function is not given in
    closed form). The DP row carries ``valid = eps <= eta / 2``.
    """
    rows = []
    if dp_epsilon is not None:
        rows.append(
            TableRow(
                "eps-DP",
                *TABLE_META["eps-DP"],
                0.25 * math.exp(-n * eta * eta / 12.0),
                12.0 * math.log(1.0 / (4.0 * delta)) / (eta * eta),
                valid=dp_epsilon <= eta / 2.0,
            )
        )
    if mi is not None:
        denom = 2.0 * n * eta * eta - 1.0
        rows.append(
            TableRow(
                "MI",
                *TABLE_META["MI"],
                (mi + 1.0) / denom if denom > 0 else math.inf,
                mi / (eta * eta * delta),
            )
        )
    if leakage is not None:
        rows.append(
            TableRow(
                "Maximal Leakage",
                *TABLE_META["Maximal Leakage"],
                2.0 * _exp_or_inf(leakage - 2.0 * n * eta * eta),
                (leakage + math.log(2.0 / delta)) / (2.0 * eta * eta),
            )
        )
    if i_alpha is not None:
        if alpha is None:
            raise ValueError("the Sibson row needs alpha along with i_alpha")
        rows.append(
            TableRow(
                "alpha-Sibson MI",
                *TABLE_META["alpha-Sibson MI"],
                cor5_bound(i_alpha, alpha, n, eta),
                sample_complexity_bound(i_alpha, alpha, eta, delta),
            )
        )
    if vc_K is not None:
        rows.append(
            TableRow(
                "VC-Dim K",
                *TABLE_META["VC-Dim K"],
                2.0 * _exp_or_inf(math.log(vc_K) - 2.0 * n * eta * eta),
                (math.log(vc_K) + math.log(2.0 / delta)) / (2.0 * eta * eta),
            )
        )
    return rows
