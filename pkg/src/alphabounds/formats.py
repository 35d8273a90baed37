"""File formats: grid CSVs, TOML problem/parameter files, CSV output, run manifests.

Grid CSV (joints and events)::

    nx,ny
    2,2
    0.4,0.1
    0.1,0.4

Problem spec (TOML)::

    seed = 0
    cap = 1000000

    [problem]
    z_size = 2
    h_size = 2
    data_dist = [0.5, 0.5]
    n = 6
    loss = [[0, 1], [1, 0]]
    sigma = 0.5            # optional

    [learner]
    kind = "erm"           # erm | gibbs | constant | random | deterministic | stochastic
    tie_break = "lowest_index"

    [verify]
    eta = [0.1, 0.2, 0.3, 0.45]
    alpha = [1.5, 2, 4, "inf"]
    collapse = false

Unknown keys anywhere are errors.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .measures import FiniteDistribution, InvalidDistribution, JointDistribution, Order


class SpecError(ValueError):
    """Malformed input file; the message names the file and offending field."""


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def read_grid(path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 2 or lines[0].replace(" ", "") != "nx,ny":
        raise SpecError(f"{path}: line 1: expected header 'nx,ny'")
    try:
        nx, ny = (int(v) for v in lines[1].split(","))
    except ValueError:
        raise SpecError(f"{path}: line 2: expected two integers 'nx,ny'") from None
    if nx < 1 or ny < 1:
        raise SpecError(f"{path}: line 2: dimensions must be positive")
    rows = lines[2:]
    if len(rows) != nx:
        raise SpecError(f"{path}: expected {nx} grid rows, found {len(rows)}")
    grid = np.empty((nx, ny))
    for i, row in enumerate(rows):
        cells = row.split(",")
        if len(cells) != ny:
            raise SpecError(f"{path}: grid row {i + 1}: expected {ny} values, found {len(cells)}")
        try:
            grid[i] = [float(c) for c in cells]
        except ValueError:
            raise SpecError(f"{path}: grid row {i + 1}: non-numeric value") from None
    return grid


def read_joint(path) -> JointDistribution:
    grid = read_grid(path)
    try:
        return JointDistribution(grid)
    except InvalidDistribution as exc:
        raise SpecError(f"{path}: {exc}") from None


def read_event(path):
    from .bounds import Event

    grid = read_grid(path)
    try:
        return Event(grid)
    except ValueError as exc:
        raise SpecError(f"{path}: {exc}") from None


def format_grid(grid) -> str:
    grid = np.asarray(grid)
    out = ["nx,ny", f"{grid.shape[0]},{grid.shape[1]}"]
    for row in grid:
        out.append(",".join(format_number(v) if grid.dtype.kind == "f" else str(int(v)) for v in row))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# numbers and CSV
# ---------------------------------------------------------------------------


def format_number(x) -> str:
    """12 significant digits; scientific outside [1e-4, 1e6); infinities as 'inf'."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    if 1e-4 <= abs(x) < 1e6:
        return f"{x:.12g}"
    return f"{x:.11e}"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# TOML specs
# ---------------------------------------------------------------------------


def load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{path}: {exc}") from None


def _reject_unknown(table: dict, allowed, where: str):
    extra = sorted(set(table) - set(allowed))
    if extra:
        raise SpecError(f"{where}: unknown key(s) {', '.join(extra)}")


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise SpecError(f"{where}: missing required key '{key}'")
    return table[key]


def _orders(values, where):
    try:
        return [Order.of(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}: {exc}") from None


@dataclass
class LearnerSpec:
    kind: str
    tie_break: str = "lowest_index"
    temperature: float = 1.0
    hypothesis: int = 0
    map: list = None
    rows: list = None


@dataclass
class ProblemSpec:
    data_dist: list
    n: int
    loss: list
    learner: LearnerSpec
    sigma: float = 0.5
    sigma_asserted: bool = False
    eta: list = field(default_factory=lambda: [0.1, 0.2, 0.3, 0.45])
    alpha: list = field(default_factory=lambda: [Order(1.5), Order(2), Order(4), Order(math.inf)])
    collapse: bool = False
    seed: int = 0
    cap: int = 10**6

    def build_problem(self):
        from .learning import LearningProblem

        return LearningProblem(
            FiniteDistribution(self.data_dist), self.n, np.array(self.loss, dtype=float), self.sigma, self.sigma_asserted
        )

    def build_learner(self, problem, space, seed=None):
        from . import learning as lrn

        seed = self.seed if seed is None else seed
        k = self.learner
        if k.kind == "erm":
            return lrn.erm_learner(problem, k.tie_break, space=space)
        if k.kind == "gibbs":
            return lrn.gibbs_learner(problem, k.temperature, space=space)
        if k.kind == "constant":
            return lrn.constant_learner(problem, k.hypothesis, space=space)
        if k.kind == "random":
            return lrn.random_learner(problem, seed, space=space)
        if k.kind == "deterministic":
            return lrn.Learner.from_map(k.map, problem.h_size, space)
        if k.kind == "stochastic":
            return lrn.Learner(np.array(k.rows, dtype=float), space, "stochastic")
        raise SpecError(f"learner.kind: unknown kind {k.kind!r}")


LEARNER_KINDS = {
    "erm": {"kind", "tie_break"},
    "gibbs": {"kind", "temperature"},
    "constant": {"kind", "hypothesis"},
    "random": {"kind"},
    "deterministic": {"kind", "map"},
    "stochastic": {"kind", "rows"},
}


def parse_problem_spec(path) -> ProblemSpec:
    doc = load_toml(path)
    where = str(path)
    _reject_unknown(doc, {"seed", "cap", "problem", "learner", "verify"}, where)
    prob = _require(doc, "problem", where)
    pw = f"{where}: [problem]"
    _reject_unknown(prob, {"z_size", "h_size", "data_dist", "n", "loss", "sigma", "sigma_asserted"}, pw)
    data_dist = _require(prob, "data_dist", pw)
    try:
        FiniteDistribution(data_dist)
    except (InvalidDistribution, TypeError, ValueError) as exc:
        raise SpecError(f"{pw}.data_dist: {exc}") from None
    loss = _require(prob, "loss", pw)
    z_size = prob.get("z_size", len(data_dist))
    if z_size != len(data_dist):
        raise SpecError(f"{pw}.z_size: {z_size} does not match len(data_dist) = {len(data_dist)}")
    if not isinstance(loss, list) or not all(isinstance(r, list) and len(r) == z_size for r in loss):
        raise SpecError(f"{pw}.loss: must be a list of rows of length z_size = {z_size}")
    h_size = prob.get("h_size", len(loss))
    if h_size != len(loss):
        raise SpecError(f"{pw}.h_size: {h_size} does not match number of loss rows {len(loss)}")
    n = _require(prob, "n", pw)
    if not isinstance(n, int) or n < 1:
        raise SpecError(f"{pw}.n: must be a positive integer")

    lw = f"{where}: [learner]"
    lrn = _require(doc, "learner", where)
    kind = _require(lrn, "kind", lw)
    if kind not in LEARNER_KINDS:
        raise SpecError(f"{lw}.kind: unknown kind {kind!r} (expected one of {', '.join(LEARNER_KINDS)})")
    _reject_unknown(lrn, LEARNER_KINDS[kind], lw)
    if kind in ("deterministic", "stochastic"):
        _require(lrn, "map" if kind == "deterministic" else "rows", lw)
    if kind == "erm" and lrn.get("tie_break", "lowest_index") not in ("lowest_index", "uniform_random"):
        raise SpecError(f"{lw}.tie_break: expected 'lowest_index' or 'uniform_random'")
    learner = LearnerSpec(**lrn)

    ver = doc.get("verify", {})
    vw = f"{where}: [verify]"
    _reject_unknown(ver, {"eta", "alpha", "collapse"}, vw)
    spec = ProblemSpec(
        data_dist=list(data_dist),
        n=n,
        loss=loss,
        learner=learner,
        sigma=float(prob.get("sigma", 0.5)),
        sigma_asserted=bool(prob.get("sigma_asserted", False)),
        collapse=bool(ver.get("collapse", False)),
        seed=int(doc.get("seed", 0)),
        cap=int(doc.get("cap", 10**6)),
    )
    if "eta" in ver:
        etas = ver["eta"]
        if not etas or not all(isinstance(e, (int, float)) and 0 < e < 1 for e in etas):
            raise SpecError(f"{vw}.eta: entries must lie in (0, 1)")
        spec.eta = [float(e) for e in etas]
    if "alpha" in ver:
        orders = _orders(ver["alpha"], f"{vw}.alpha")
        if not orders or any(o.value < 1 for o in orders):
            raise SpecError(f"{vw}.alpha: entries must be >= 1")
        spec.alpha = orders
    return spec


TABLE_KEYS = ("n", "eta", "delta", "mi", "leakage", "i_alpha", "alpha", "vc_K", "dp_epsilon")


def parse_table_params(path) -> dict:
    doc = load_toml(path)
    _reject_unknown(doc, TABLE_KEYS, str(path))
    for key in ("n", "eta", "delta"):
        _require(doc, key, str(path))
    params = dict(doc)
    if "alpha" in params:
        params["alpha"] = _orders([params["alpha"]], f"{path}: alpha")[0]
    return params


def dump_problem_toml(spec: dict) -> str:
    """Serialise a problem spec dict (as produced by ``gen-problem``) to TOML."""

    def val(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return json.dumps(v)
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(val(x) for x in v) + "]"
        if isinstance(v, float):
            return repr(v)
        return str(v)

    out = []
    for k, v in spec.items():
        if not isinstance(v, dict):
            out.append(f"{k} = {val(v)}")
    for k, v in spec.items():
        if isinstance(v, dict):
            out.append(f"\n[{k}]")
            out.extend(f"{kk} = {val(vv)}" for kk, vv in v.items())
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    seed: int
    version: str
    command: list
    inputs: dict
    units: str = "nats"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"
