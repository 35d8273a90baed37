"""Structural properties of the measures, checked with hypothesis and seeded sweeps."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from alphabounds.measures import (
    JointDistribution,
    maximal_leakage,
    mutual_information,
    renyi_divergence,
    sibson_mi,
)

from conftest import joints, random_kernel

GRID = [0.5, 0.9, 1.0, 1.1, 2, 4, 10]


@st.composite
def dist_pairs(draw, full_support=True):
    k = draw(st.integers(1, 8))
    cell = st.floats(1e-3, 1) if full_support else st.one_of(st.just(0.0), st.floats(1e-3, 1))
    p = np.array(draw(st.lists(cell, min_size=k, max_size=k).filter(lambda c: sum(c) > 1e-3)))
    q = np.array(draw(st.lists(st.floats(1e-3, 1), min_size=k, max_size=k)))
    return p / p.sum(), q / q.sum()


@settings(max_examples=500, deadline=None)
@given(dist_pairs(full_support=False), st.sampled_from([0.5, 2.0, 3.0]))
def test_form_equivalence(pq, alpha):
    # P << Q holds since q has full support
    p, q = pq
    live = p > 0
    direct = np.sum(p[live] ** alpha * q[live] ** (1 - alpha))
    under_p = np.sum((q[live] / p[live]) ** (1 - alpha) * p[live])
    under_q = np.sum((p / q) ** alpha * q)
    assert abs(direct - under_p) <= 1e-12 * max(1.0, direct)
    assert abs(direct - under_q) <= 1e-12 * max(1.0, direct)


@settings(max_examples=300, deadline=None)
@given(dist_pairs())
def test_renyi_nondecreasing_in_order(pq):
    p, q = pq
    vals = [renyi_divergence(p, q, a) for a in GRID]
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))


@settings(max_examples=300, deadline=None)
@given(joints(), st.sampled_from(GRID + ["inf"]))
def test_nonnegative(j, alpha):
    assert sibson_mi(j, alpha) >= -1e-12
    assert renyi_divergence(j, j.product(), alpha) >= -1e-12
    assert maximal_leakage(j) >= -1e-12
    assert mutual_information(j) >= -1e-12


@settings(max_examples=300, deadline=None)
@given(joints(), st.sampled_from([0.5, 1.5, 2, 5, 1, "inf"]))
def test_sibson_below_product_divergence(j, alpha):
    # Q_Y = P_Y is feasible in the minimisation
    assert sibson_mi(j, alpha) <= renyi_divergence(j, j.product(), alpha) + 1e-10


@settings(max_examples=200, deadline=None)
@given(joints(max_x=4, max_y=4), st.integers(1, 5), st.integers(0, 2**32 - 1), st.sampled_from(GRID + ["inf"]))
def test_post_processing_cannot_increase(j, k, seed, alpha):
    kernel = random_kernel(np.random.default_rng(seed), j.ny, k)
    garbled = j.garble(kernel)
    assert sibson_mi(garbled, alpha) <= sibson_mi(j, alpha) + 1e-10
    assert maximal_leakage(garbled) <= maximal_leakage(j) + 1e-10


@settings(max_examples=200, deadline=None)
@given(joints(max_x=6, max_y=6, full_support=True))
def test_limits(j):
    assert abs(sibson_mi(j, 1 + 1e-4) - mutual_information(j)) <= 1e-3
    assert abs(sibson_mi(j, 1e4) - maximal_leakage(j)) <= 1e-3


@settings(max_examples=200, deadline=None)
@given(joints())
def test_scaled_sibson_nondecreasing(j):
    vals = [(a - 1) / a * sibson_mi(j, a) for a in (1.1, 1.5, 2, 4, 10, 100)]
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))
    assert math.isfinite(vals[-1])


def test_deterministic_garbling_of_identity():
    j = JointDistribution(np.eye(4) / 4)
    merge = np.array([[1, 0], [1, 0], [0, 1], [0, 1]], dtype=float)
    assert sibson_mi(j.garble(merge), 3) == np.float64(sibson_mi(JointDistribution(np.eye(2) / 2), 3))
