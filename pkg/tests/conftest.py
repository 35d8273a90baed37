import numpy as np
import pytest
from hypothesis import strategies as st

from alphabounds.learning import constant_predictor_problem, dataset_space
from alphabounds.measures import JointDistribution

DIAG = [[0.4, 0.1], [0.1, 0.4]]


def random_joint(rng, nx, ny, sparsity=0.0):
    m = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    if sparsity > 0:
        m = m * (rng.random((nx, ny)) >= sparsity)
        if m.sum() == 0:
            m[rng.integers(nx), rng.integers(ny)] = 1.0
    return JointDistribution(m / m.sum())


def random_kernel(rng, n_in, n_out):
    return rng.dirichlet(np.ones(n_out), size=n_in)


@st.composite
def joints(draw, max_x=5, max_y=5, full_support=False):
    nx = draw(st.integers(1, max_x))
    ny = draw(st.integers(1, max_y))
    # zero or bounded away from zero: subnormal masses only test float underflow
    cell = st.floats(0.01, 1.0) if full_support else st.one_of(st.just(0.0), st.floats(1e-3, 1.0))
    cells = draw(
        st.lists(cell, min_size=nx * ny, max_size=nx * ny).filter(
            lambda c: sum(c) > 1e-3
        )
    )
    m = np.array(cells).reshape(nx, ny)
    return JointDistribution(m / m.sum())


@pytest.fixture
def diag():
    return JointDistribution(DIAG)


@pytest.fixture
def desk():
    problem = constant_predictor_problem(0.5, 6)
    return problem, dataset_space(problem)
