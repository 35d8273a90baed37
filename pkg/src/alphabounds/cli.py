"""Command-line interface: ``alphabounds {measure,bound,sweep,verify,table,gen-problem}``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bounds as bd
from . import expectation as ex
from . import learning as lrn
from .formats import (
    RunManifest,
    SpecError,
    dump_problem_toml,
    file_digest,
    format_grid,
    parse_problem_spec,
    parse_table_params,
    read_event,
    read_joint,
    to_csv,
)
from .measures import HolderPair, Order, inverse_conjugate, renyi_divergence, sibson_mi

LN2 = math.log(2.0)


def _orders(text: str):
    try:
        orders = [Order.of(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not orders:
        raise argparse.ArgumentTypeError("empty order list")
    return orders


def _order(text: str):
    try:
        return Order.of(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _unit_scale(units: str) -> float:
    return 1.0 / LN2 if units == "bits" else 1.0


class Output:
    """Collects CSV text and writes it (plus a manifest) to ``--out`` or stdout."""

    def __init__(self, args, inputs):
        self.args = args
        self.inputs = inputs

    def emit(self, text: str, seed: int = 0):
        out = self.args.out
        if out is None:
            sys.stdout.write(text)
            return
        Path(out).write_text(text, encoding="utf-8")
        manifest = RunManifest(
            seed=seed,
            version=__version__,
            command=[self.args.command] + self.args.argv_tail,
            inputs={str(p): file_digest(p) for p in self.inputs},
            units=getattr(self.args, "units", "nats"),
        )
        Path(str(out) + ".manifest.json").write_text(manifest.to_json(), encoding="utf-8")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_measure(args) -> int:
    joint = read_joint(args.joint)
    scale = _unit_scale(args.units)
    product = np.outer(joint.px, joint.py)
    rows = []
    for a in args.alpha:
        rows.append(("renyi_divergence", str(a), renyi_divergence(joint.mass, product, a) * scale))
        rows.append(("sibson_mi", str(a), sibson_mi(joint, a) * scale))
    rows.append(("mutual_information", "1.0", sibson_mi(joint, 1) * scale))
    rows.append(("maximal_leakage", "inf", sibson_mi(joint, math.inf) * scale))
    Output(args, [args.joint]).emit(to_csv(("measure", "alpha", args.units), rows))
    return 0


def _report_row(rep: bd.BoundReport):
    p = rep.parameters
    return (
        rep.name,
        str(Order(p["alpha"])) if "alpha" in p else "",
        str(Order(p["alpha_prime"])) if "alpha_prime" in p else "",
        rep.lhs,
        rep.rhs,
        rep.slack,
        rep.holds,
    )


def cmd_bound(args) -> int:
    joint = read_joint(args.joint)
    event = read_event(args.event)
    if joint.shape != event.indicator.shape:
        raise SpecError(f"{args.event}: event shape {event.indicator.shape} does not match joint {joint.shape}")
    a = args.alpha
    if args.kind == "theorem1":
        ap = args.alpha_prime if args.alpha_prime is not None else a
        rep = bd.theorem1_bound(joint, event, HolderPair(a, ap))
    elif args.kind == "alpha_div":
        rep = bd.corollary_alpha_div_bound(joint, event, a)
    elif args.kind == "sibson":
        rep = bd.corollary_sibson_bound(joint, event, a)
    else:
        rep = bd.corollary_leakage_bound(joint, event)
    header = ("bound", "alpha", "alpha_prime", "lhs", "rhs", "slack", "holds")
    Output(args, [args.joint, args.event]).emit(to_csv(header, [_report_row(rep)]))
    return 0 if rep.holds else 1


def cmd_sweep(args) -> int:
    joint = read_joint(args.joint)
    event = read_event(args.event)
    if joint.shape != event.indicator.shape:
        raise SpecError(f"{args.event}: event shape {event.indicator.shape} does not match joint {joint.shape}")
    scale = _unit_scale(args.units)
    orders = sorted(set(args.alpha), key=lambda o: o.value)
    rows = []
    for a in orders:
        w = inverse_conjugate(a)
        if args.kind == "sibson":
            info = sibson_mi(joint, a)
            target = bd.esssup_fiber(joint, event)
            rep = bd.corollary_sibson_bound(joint, event, a, info=info)
        else:
            info = renyi_divergence(joint.mass, np.outer(joint.px, joint.py), a)
            target = bd.product_probability(joint, event)
            rep = bd.corollary_alpha_div_bound(joint, event, a)
        info_term = 0.0 if w == 0 else w * info
        fiber_term = 0.0 if w == 0 else (w * math.log(target) if target > 0 else -math.inf)
        rows.append((str(a), info_term * scale, fiber_term * scale, rep.rhs))
    best, rep = bd.best_order(joint, event, orders, args.kind)
    print(f"best alpha: {best} rhs: {rep.rhs!r}", file=sys.stderr)
    header = ("alpha", "info_term", "fiber_term", "rhs")
    Output(args, [args.joint, args.event]).emit(to_csv(header, rows))
    return 0


VERIFY_HEADER = ("eta", "alpha", "kind", "info", "lhs", "rhs", "slack", "holds", "b_below_e")


def run_verify(spec, seed: int, cap: int, units: str = "nats"):
    """Evaluate every bound on the enumerated problem; returns ``(rows, all_hold)``."""
    problem = spec.build_problem()
    learner_kind = spec.learner.kind
    if spec.collapse and learner_kind in ("erm", "gibbs", "constant"):
        space = lrn.dataset_space(problem, collapse=True, cap=cap)
        learner = spec.build_learner(problem, space, seed)
    else:
        space = lrn.dataset_space(problem, cap=cap)
        learner = spec.build_learner(problem, space, seed)
        if spec.collapse:
            learner = lrn.collapse_learner(problem, learner)
            space = learner.space
    joint = lrn.build_joint(problem, learner)
    scale = _unit_scale(units)
    info = {a: sibson_mi(joint, a) for a in spec.alpha}
    zero_one = problem.is_zero_one and problem.sigma == 0.5
    n, sigma = problem.n, problem.sigma

    rows = []
    ok = True

    def add(eta, alpha, kind, i_a, lhs, rhs, flag=None):
        nonlocal ok
        holds = lhs <= rhs + bd.HOLDS_TOL
        ok = ok and holds
        rows.append(
            (
                "" if eta is None else eta,
                "" if alpha is None else str(alpha),
                kind,
                "" if i_a is None else i_a * scale,
                lhs,
                rhs,
                rhs - lhs,
                holds,
                "" if flag is None else flag,
            )
        )

    for eta in spec.eta:
        event = lrn.generalization_event(problem, eta, space)
        fibers = space.probs @ event.indicator
        add(eta, None, "fiber", None, float(fibers.max()), lrn.hoeffding_fiber_bound(n, eta, sigma))
        p_event = bd.event_probability(joint, event)
        for a in spec.alpha:
            if zero_one:
                add(eta, a, "cor5", info[a], p_event, lrn.cor5_bound(info[a], a, n, eta))
            else:
                add(eta, a, "cor7", info[a], p_event, lrn.cor7_bound(info[a], a, n, eta, sigma))
            rep = bd.corollary_sibson_bound(joint, event, a, info=info[a])
            add(eta, a, "sibson_exact", info[a], rep.lhs, rep.rhs)

    expected = ex.exact_expected_generr(problem, learner)
    for a in spec.alpha:
        if a.value <= 1:
            continue
        tail = ex.theorem10_tail_spec(n, sigma, a, info[a])
        add(None, a, "expected", info[a], expected, ex.expected_generr_bound(n, sigma, a, info[a]), tail.b_below_e)
    if problem.is_zero_one:
        leak = sibson_mi(joint, math.inf)
        add(None, Order(math.inf), "leakage_expected", leak, expected, ex.leakage_expected_bound(n, leak))
    return rows, ok


def cmd_verify(args) -> int:
    spec = parse_problem_spec(args.spec)
    seed = spec.seed if args.seed is None else args.seed
    cap = spec.cap if args.cap is None else args.cap
    if args.eta:
        spec.eta = args.eta
    if args.alpha:
        spec.alpha = args.alpha
    rows, ok = run_verify(spec, seed, cap, args.units)
    Output(args, [args.spec]).emit(to_csv(VERIFY_HEADER, rows), seed=seed)
    violated = sum(1 for r in rows if r[7] is False)
    print(f"{len(rows)} checks, {violated} violated", file=sys.stderr)
    return 0 if ok else 1


TABLE_HEADER = ("name", "robust", "adaptive", "bound", "sample_complexity", "valid")
TABLE_ROWS = {
    "eps-DP": ("dp_epsilon",),
    "MI": ("mi",),
    "Maximal Leakage": ("leakage",),
    "alpha-Sibson MI": ("i_alpha", "alpha"),
    "VC-Dim K": ("vc_K",),
}


def cmd_table(args) -> int:
    params = parse_table_params(args.params)
    for name, keys in TABLE_ROWS.items():
        missing = [k for k in keys if k not in params]
        if missing:
            print(f"notice: row '{name}' omitted (missing {', '.join(missing)})", file=sys.stderr)
    if "i_alpha" in params and "alpha" not in params:
        params.pop("i_alpha")
    rows = lrn.baseline_table(**params)
    out = [(r.name, r.robust, r.adaptive, r.bound, r.sample_complexity, "" if r.valid is None else r.valid) for r in rows]
    Output(args, [args.params]).emit(to_csv(TABLE_HEADER, out))
    return 0


def _random_joint(rng, nx, ny, sparsity=0.0):
    m = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    if sparsity > 0:
        m = m * (rng.random((nx, ny)) >= sparsity)
        if m.sum() == 0:
            m[rng.integers(nx), rng.integers(ny)] = 1.0
    return m / m.sum()


def cmd_gen_problem(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.emit == "joint":
        nx, ny = args.shape
        Output(args, []).emit(format_grid(_random_joint(rng, nx, ny, args.sparsity)), seed=args.seed)
        return 0
    if args.emit == "event":
        nx, ny = args.shape
        Output(args, []).emit(format_grid((rng.random((nx, ny)) < 0.5).astype(int)), seed=args.seed)
        return 0
    z, h = args.z_size, args.h_size
    data = rng.dirichlet(np.ones(z))
    data = [float(v) for v in data / data.sum()]
    data[-1] = 1.0 - sum(data[:-1])
    if args.loss == "zero_one":
        loss = rng.integers(0, 2, size=(h, z)).astype(float)
    else:
        loss = np.round(rng.random((h, z)), 6)
    learner = {"kind": args.learner}
    if args.learner == "gibbs":
        learner["temperature"] = args.temperature
    doc = {
        "seed": args.seed,
        "cap": 10**6,
        "problem": {"z_size": z, "h_size": h, "data_dist": data, "n": args.n, "loss": loss.tolist()},
        "learner": learner,
        "verify": {"eta": [0.1, 0.2, 0.3, 0.45], "alpha": [1.5, 2.0, 4.0, "inf"]},
    }
    Output(args, []).emit(dump_problem_toml(doc), seed=args.seed)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphabounds", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, units=True):
        sp.add_argument("--out", help="write CSV here (and a .manifest.json next to it) instead of stdout")
        if units:
            sp.add_argument("--units", choices=("nats", "bits"), default="nats")

    sp = sub.add_parser("measure", help="divergences and information measures of a joint")
    sp.add_argument("joint")
    sp.add_argument("--alpha", type=_orders, default=_orders("0.5,2,inf"))
    common(sp)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("bound", help="evaluate one bound on a joint and event")
    sp.add_argument("joint")
    sp.add_argument("event")
    sp.add_argument("--alpha", type=_order, default=Order(2))
    sp.add_argument("--alpha-prime", type=_order, default=None)
    sp.add_argument("--kind", choices=("theorem1", "alpha_div", "sibson", "leakage"), default="sibson")
    common(sp, units=False)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("sweep", help="right-hand side over a grid of orders")
    sp.add_argument("joint")
    sp.add_argument("event")
    sp.add_argument("--alpha", type=_orders, default=_orders("1,1.5,2,4,10,inf"))
    sp.add_argument("--kind", choices=bd.BOUND_KINDS, default="sibson")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="exact enumeration check of the learning bounds")
    sp.add_argument("spec")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("--eta", type=_floats, default=None)
    sp.add_argument("--alpha", type=_orders, default=None)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("table", help="comparison table of generalization bounds")
    sp.add_argument("params")
    common(sp, units=False)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("gen-problem", help="emit a seeded random problem spec, joint or event")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--emit", choices=("problem", "joint", "event"), default="problem")
    sp.add_argument("--shape", type=int, nargs=2, default=(3, 3), metavar=("NX", "NY"))
    sp.add_argument("--sparsity", type=float, default=0.0)
    sp.add_argument("--z-size", type=int, default=2)
    sp.add_argument("--h-size", type=int, default=2)
    sp.add_argument("-n", type=int, default=6)
    sp.add_argument("--loss", choices=("zero_one", "bounded"), default="zero_one")
    sp.add_argument("--learner", choices=("erm", "gibbs", "constant", "random"), default="erm")
    sp.add_argument("--temperature", type=float, default=1.0)
    common(sp, units=False)
    sp.set_defaults(func=cmd_gen_problem)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv_tail = argv[1:]
    try:
        return args.func(args)
    except (SpecError, lrn.CapExceeded, lrn.NotExchangeable, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
