"""Exact check of the high-probability and expected bounds on the desk instance.

Two fair-coin points, two constant predictors, 0-1 loss, n = 6. Every learner
in the catalogue is enumerated over all 64 datasets; prints one summary line
per (learner, check) and exits nonzero if any bound fails.

    python scripts/desk_verification.py
"""

import argparse
import sys

from alphabounds import learning as lrn
from alphabounds.cli import run_verify
from alphabounds.formats import LearnerSpec, ProblemSpec

LEARNERS = {
    "erm": LearnerSpec("erm"),
    "erm-uniform": LearnerSpec("erm", tie_break="uniform_random"),
    "gibbs-0.1": LearnerSpec("gibbs", temperature=0.1),
    "gibbs-1": LearnerSpec("gibbs", temperature=1.0),
    "gibbs-10": LearnerSpec("gibbs", temperature=10.0),
    "constant": LearnerSpec("constant"),
    "random": LearnerSpec("random"),
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("-n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    all_ok = True
    print(f"{'learner':<12} {'kind':<17} {'checks':>6} {'min slack':>12}")
    for name, learner in LEARNERS.items():
        spec = ProblemSpec(data_dist=[0.5, 0.5], n=args.n, loss=[[0, 1], [1, 0]], learner=learner)
        rows, ok = run_verify(spec, seed=args.seed, cap=lrn.DEFAULT_CAP)
        all_ok &= ok
        kinds = {}
        for row in rows:
            kinds.setdefault(row[2], []).append(row[6])
        for kind, slacks in kinds.items():
            print(f"{name:<12} {kind:<17} {len(slacks):>6} {min(slacks):>12.4g}")
    print("all bounds hold" if all_ok else "VIOLATION", file=sys.stderr)
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
