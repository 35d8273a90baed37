"""Information versus temperature for the Gibbs learner, with the resulting bounds.

Hotter Gibbs learners leak less about the dataset; this prints I_alpha,
the exact P(gen-err > eta), the Sibson-based bound and the expected-error
bound across a temperature sweep, as CSV. With the two complementary constant
predictors both hypotheses share the same |L_S - L_P|, so the exact expected
error does not depend on the learner; only the bounds move.

    python scripts/gibbs_temperature.py --eta 0.3 --alpha 2
"""

import argparse
import sys

import numpy as np

from alphabounds import expectation as ex
from alphabounds import learning as lrn
from alphabounds.bounds import event_probability
from alphabounds.formats import to_csv
from alphabounds.measures import Order, sibson_mi


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("-n", type=int, default=8)
    p.add_argument("-p", type=float, default=0.3, help="Bernoulli data parameter")
    p.add_argument("--eta", type=float, default=0.3)
    p.add_argument("--alpha", type=Order.of, default=Order(2))
    p.add_argument("--points", type=int, default=13)
    args = p.parse_args(argv)

    problem = lrn.constant_predictor_problem(args.p, args.n)
    space = lrn.dataset_space(problem, collapse=True)
    event = lrn.generalization_event(problem, args.eta, space)
    rows = []
    for t in np.logspace(-2, 2, args.points):
        learner = lrn.gibbs_learner(problem, float(t), space)
        joint = lrn.build_joint(problem, learner)
        i_a = sibson_mi(joint, args.alpha)
        rows.append(
            (
                float(t),
                i_a,
                event_probability(joint, event),
                lrn.cor5_bound(i_a, args.alpha, args.n, args.eta),
                ex.exact_expected_generr(problem, learner),
                ex.expected_generr_bound(args.n, problem.sigma, args.alpha, i_a),
            )
        )
    header = ("temperature", "i_alpha", "p_event", "cor5_bound", "expected_generr", "expected_bound")
    sys.stdout.write(to_csv(header, rows))


if __name__ == "__main__":
    main()
