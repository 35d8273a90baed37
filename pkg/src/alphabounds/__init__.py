"""Rényi/Sibson information measures and change-of-measure generalization bounds on finite alphabets."""

__version__ = "0.1.0"

from .measures import (  # noqa: E402
    INFINITY,
    ONE,
    FiniteDistribution,
    HolderPair,
    JointDistribution,
    Order,
    conjugate,
    kl_divergence,
    maximal_leakage,
    mutual_information,
    optimal_output_distribution,
    renyi_divergence,
    sibson_mi,
    sibson_mi_minimization_oracle,
)
from .bounds import (  # noqa: E402
    BoundReport,
    Event,
    best_order,
    corollary_alpha_div_bound,
    corollary_leakage_bound,
    corollary_sibson_bound,
    esssup_fiber,
    event_probability,
    fiber_probability,
    product_probability,
    theorem1_bound,
)
