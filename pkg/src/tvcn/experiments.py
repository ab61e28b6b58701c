"""End-to-end scenarios: evolve, analyse, route and rate-control.

Every scenario is driven by a :class:`ScenarioConfig` and writes CSV files
with a header row and a fixed column order. All randomness derives from the
evolution seed, so a config reproduces its outputs byte for byte.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import (InsufficientData, compare_sim_theory, degree_distribution,
                       theoretical_exponents, write_comparison_csv, write_distribution_csv)
from .centrality import CentralityScores, score_graph
from .evolution import EvolutionParams, evolve
from .graph import DirectedGraph
from .rate_control import (RateParams, RateResult, UserSession, assign_gains, build_incidence,
                           graph_capacities, integrate, willingness_to_pay)
from .routing import (CapacityModel, NoRoute, RoutePath, UserPair, all_shortest_paths,
                      initial_rates, random_user_pairs, read_user_pairs, select_extremal_paths)

logger = logging.getLogger(__name__)

# (beta, gamma) cells for delta = 1, < 1, > 1 and ~0
DEGREE_CELLS = ((0.5, 0.5), (0.6, 0.5), (0.25, 0.7), (0.9, 0.9))

SCORE_KEYS = ("theta_gr", "theta_g", "theta_r")

EXTREMAL_COLUMNS = ["user", "S", "D", "path_len", "theta_gr_min", "x_star_min",
                    "theta_gr_max", "x_star_max"]
VARIANT_COLUMNS = ["metric", "user", "S", "D", "path_len", "score_min", "x_star_min",
                   "score_max", "x_star_max"]
TRACE_COLUMNS = ["epoch", "step", "num_nodes", "user", "S", "D", "path_len", "x_star",
                 "converged", "flag"]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a scenario needs.

    ``users`` and ``trace_users`` are either a directive ``"random K"``, a
    path to a ``user_id,S,D`` CSV file, or a list of ``[user_id, S, D]``.
    """

    evolution: EvolutionParams = EvolutionParams()
    rate: RateParams = RateParams()
    capacity: CapacityModel = CapacityModel(node_floor=1.0)
    users: str | list = "random 39"
    trace_users: str | list = "random 2"
    snapshot_interval: int = 500
    epochs: int = 5
    sizes: tuple[int, ...] = (500, 2000)
    cells: tuple[tuple[float, float], ...] = DEGREE_CELLS
    k_min: int = 5
    outputs: str = "out"

    def __post_init__(self):
        if self.snapshot_interval < 1:
            raise ValueError("snapshot_interval must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        for n in self.sizes:
            if n <= self.evolution.n0:
                raise ValueError(f"size {n} must exceed n0={self.evolution.n0}")

    @property
    def seed(self) -> int:
        return self.evolution.seed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        d["cells"] = [list(c) for c in self.cells]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> ScenarioConfig:
        data = dict(data)
        kw = {}
        if "evolution" in data:
            kw["evolution"] = EvolutionParams(**data.pop("evolution"))
        if "rate" in data:
            kw["rate"] = RateParams(**data.pop("rate"))
        if "capacity" in data:
            kw["capacity"] = CapacityModel(**data.pop("capacity"))
        if "sizes" in data:
            kw["sizes"] = tuple(int(n) for n in data.pop("sizes"))
        if "cells" in data:
            kw["cells"] = tuple((float(b), float(g)) for b, g in data.pop("cells"))
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**kw, **data)

    def with_overrides(self, **flat) -> ScenarioConfig:
        """Apply flat overrides such as ``beta=0.3`` or ``dt=0.005``; None is ignored."""
        flat = {k: v for k, v in flat.items() if v is not None}
        evo = {k: flat.pop(k) for k in list(flat) if k in EvolutionParams.__dataclass_fields__}
        rate = {k: flat.pop(k) for k in list(flat) if k in RateParams.__dataclass_fields__}
        cfg = self
        if evo:
            cfg = replace(cfg, evolution=cfg.evolution.replace(**evo))
        if rate:
            cfg = replace(cfg, rate=replace(cfg.rate, **rate))
        return replace(cfg, **flat) if flat else cfg


def load_config(path: str | Path) -> ScenarioConfig:
    return ScenarioConfig.from_dict(json.loads(Path(path).read_text()))


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n")


def _stream(seed: int, purpose: int) -> np.random.Generator:
    """Independent generator per purpose so adding draws in one place never shifts another."""
    return np.random.default_rng(np.random.SeedSequence([seed, purpose]))


USER_STREAM, GAIN_STREAM = 1, 2


def resolve_users(spec: str | list, g: DirectedGraph, seed: int,
                  adj: Sequence[Sequence[int]] | None = None) -> list[UserPair]:
    if isinstance(spec, list):
        return [UserPair(str(u), int(s), int(d)) for u, s, d in spec]
    parts = spec.split()
    if len(parts) == 2 and parts[0] == "random":
        return random_user_pairs(g, int(parts[1]), _stream(seed, USER_STREAM), adj)
    return read_user_pairs(spec)


# -- route selection and rate solving ---------------------------------------
@dataclass
class UserRoutes:
    user: UserPair
    extremes: dict[str, tuple[RoutePath, RoutePath]] = field(default_factory=dict)
    error: str = ""


def plan_routes(adj: Sequence[Sequence[int]], users: Sequence[UserPair], scores: CentralityScores,
                keys: Sequence[str] = SCORE_KEYS) -> list[UserRoutes]:
    plans = []
    for u in users:
        plan = UserRoutes(u)
        try:
            paths = all_shortest_paths(adj, u.source, u.dest)
        except NoRoute as exc:
            plan.error = "no_route"
            logger.warning("%s: %s", u.user_id, exc)
        else:
            for key in keys:
                plan.extremes[key] = select_extremal_paths(paths, scores, key)
        plans.append(plan)
    return plans


def solve_rates(g: DirectedGraph, routes: dict[str, RoutePath], gains: dict[str, float],
                rate: RateParams, capacity: CapacityModel) -> RateResult:
    """Initial rates, payments and the integrated fixed point for fixed routes."""
    x0 = initial_rates({u: r.nodes for u, r in routes.items()}, g, capacity)
    sessions = [
        UserSession(u, r, pay=willingness_to_pay(x0[u], rate.pay_a, rate.pay_b),
                    gain=gains[u], rate=x0[u])
        for u, r in routes.items()
    ]
    incidence = build_incidence(sessions, graph_capacities(g, sessions, capacity))
    return integrate(incidence, rate)


def _num(x: float, digits: int = 10) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.{digits}g}"


def _writer(path: Path):
    fh = open(path, "w", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


# -- degree experiment ---------------------------------------------------------
def run_degree_experiment(config: ScenarioConfig, out_dir: str | Path | None = None) -> list[dict]:
    """Degree distributions and simulated-vs-mean-field exponents per cell and size."""
    out = Path(out_dir or config.outputs)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for beta, gamma in config.cells:
        for n in config.sizes:
            params = config.evolution.replace(beta=beta, gamma=gamma, steps=n - config.evolution.n0)
            g, _, _ = evolve(params)
            hist = degree_distribution(g, "in")
            write_distribution_csv(hist, out / f"degree_b{beta:g}_g{gamma:g}_N{n}.csv")
            try:
                row = compare_sim_theory(params, g, k_min=config.k_min)
            except InsufficientData as exc:
                logger.warning("beta=%g gamma=%g N=%d: %s", beta, gamma, n, exc)
                th = theoretical_exponents(params)
                row = {"beta": beta, "gamma": gamma, "X": params.X, "N": n, "c": th.c,
                       "theta1": th.theta1, "theta2": th.theta2, "alpha_theory": th.alpha,
                       "alpha_sim": math.nan, "stderr": math.nan, "gap": math.nan}
            rows.append(row)
    columns = ["beta", "gamma", "X", "c", "theta1", "theta2", "alpha_theory", "alpha_sim", "gap", "N"]
    fh, w = _writer(out / "comparison.csv")
    with fh:
        w.writerow(columns)
        for row in rows:
            w.writerow([_num(row[c]) if isinstance(row[c], float) else row[c] for c in columns])
    return rows


# -- extremal comparison ---------------------------------------------------------
@dataclass
class ExtremalSummary:
    rows: list[dict]
    variants: list[dict]
    results: dict[str, tuple[RateResult, RateResult]]

    def rate_pairs(self, key: str = "theta_gr") -> tuple[np.ndarray, np.ndarray]:
        rows = [r for r in (self.rows if key == "theta_gr" else
                            [v for v in self.variants if v["metric"] == key]) if not r.get("flag")]
        lo = np.array([r["x_star_min"] for r in rows])
        hi = np.array([r["x_star_max"] for r in rows])
        return lo, hi

    def fraction_min_ge_max(self, key: str = "theta_gr", atol: float = 1e-9) -> float:
        lo, hi = self.rate_pairs(key)
        return float(np.mean(lo >= hi - atol)) if lo.size else math.nan

    def median_ratio(self, key: str = "theta_gr") -> float:
        lo, hi = self.rate_pairs(key)
        ok = (lo > 0) & (hi > 0)
        return float(np.median(lo[ok] / hi[ok])) if ok.any() else math.nan


def extremal_comparison(g: DirectedGraph, users: Sequence[UserPair], config: ScenarioConfig,
                        scores: CentralityScores | None = None) -> ExtremalSummary:
    adj = g.undirected_adjacency()
    if scores is None:
        scores = score_graph(g)
    plans = plan_routes(adj, users, scores)
    routed = [p for p in plans if not p.error]
    gains = assign_gains([p.user.user_id for p in routed], _stream(config.seed, GAIN_STREAM))

    results: dict[str, tuple[RateResult, RateResult]] = {}
    for key in SCORE_KEYS:
        lo = {p.user.user_id: p.extremes[key][0] for p in routed}
        hi = {p.user.user_id: p.extremes[key][1] for p in routed}
        if routed:
            results[key] = (solve_rates(g, lo, gains, config.rate, config.capacity),
                            solve_rates(g, hi, gains, config.rate, config.capacity))

    rows, variants = [], []
    for p in plans:
        u = p.user
        for key in SCORE_KEYS:
            if p.error:
                rec = {"metric": key, "user": u.user_id, "S": u.source, "D": u.dest,
                       "path_len": math.nan, "score_min": math.nan, "x_star_min": math.nan,
                       "score_max": math.nan, "x_star_max": math.nan, "flag": p.error}
            else:
                lo_path, hi_path = p.extremes[key]
                r_lo, r_hi = results[key]
                rec = {"metric": key, "user": u.user_id, "S": u.source, "D": u.dest,
                       "path_len": lo_path.length,
                       "score_min": lo_path.score.value(key), "x_star_min": r_lo.x_star[u.user_id],
                       "score_max": hi_path.score.value(key), "x_star_max": r_hi.x_star[u.user_id],
                       "flag": ""}
            variants.append(rec)
            if key == "theta_gr":
                rows.append({"user": rec["user"], "S": rec["S"], "D": rec["D"],
                             "path_len": rec["path_len"], "theta_gr_min": rec["score_min"],
                             "x_star_min": rec["x_star_min"], "theta_gr_max": rec["score_max"],
                             "x_star_max": rec["x_star_max"], "flag": rec["flag"]})
    return ExtremalSummary(rows, variants, results)


def run_extremal_comparison(config: ScenarioConfig, out_dir: str | Path | None = None,
                            graph: DirectedGraph | None = None) -> ExtremalSummary:
    """Rates along min- and max-score geodesics for every user.

    Writes ``extremal.csv`` (min/max ``theta_gr``) and ``variants.csv`` with
    the betweenness-only and reputation-only selections as well.
    """
    out = Path(out_dir or config.outputs)
    out.mkdir(parents=True, exist_ok=True)
    g = graph if graph is not None else evolve(config.evolution)[0]
    users = resolve_users(config.users, g, config.seed)
    summary = extremal_comparison(g, users, config)
    write_extremal_csv(summary, out / "extremal.csv")
    write_variants_csv(summary, out / "variants.csv")
    return summary


def write_extremal_csv(summary: ExtremalSummary, path: Path) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(EXTREMAL_COLUMNS)
        for r in summary.rows:
            w.writerow([_cell(r[c]) for c in EXTREMAL_COLUMNS])


def write_variants_csv(summary: ExtremalSummary, path: Path) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(VARIANT_COLUMNS)
        for r in summary.variants:
            w.writerow([_cell(r[c]) for c in VARIANT_COLUMNS])


def _cell(value) -> str:
    if isinstance(value, float):
        return _num(value)
    return str(value)


# -- rate trace over growth ---------------------------------------------------------
def run_rate_trace_experiment(config: ScenarioConfig, out_dir: str | Path | None = None) -> list[dict]:
    """Re-converged rates of a fixed user set as the network keeps growing.

    The network first grows ``snapshot_interval`` steps, users are drawn from
    it, then each epoch recomputes centralities, min-``theta_gr`` routes,
    capacities and the rate fixed point before growing another interval.
    """
    out = Path(out_dir or config.outputs)
    out.mkdir(parents=True, exist_ok=True)
    dt_steps = config.snapshot_interval
    params = config.evolution.replace(steps=dt_steps)
    rng = np.random.default_rng(params.seed)
    g, _, _ = evolve(params, rng=rng)
    users = resolve_users(config.trace_users, g, config.seed)
    gains = assign_gains([u.user_id for u in users], _stream(config.seed, GAIN_STREAM))

    rows = []
    for epoch in range(1, config.epochs + 1):
        if epoch > 1:
            evolve(params, graph=g, rng=rng)
        adj = g.undirected_adjacency()
        scores = score_graph(g)
        plans = plan_routes(adj, users, scores, keys=("theta_gr",))
        routed = {p.user.user_id: p.extremes["theta_gr"][0] for p in plans if not p.error}
        result = (solve_rates(g, routed, {u: gains[u] for u in routed}, config.rate, config.capacity)
                  if routed else None)
        for p in plans:
            u = p.user
            row = {"epoch": epoch, "step": epoch * dt_steps, "num_nodes": g.num_nodes,
                   "user": u.user_id, "S": u.source, "D": u.dest}
            if p.error:
                row.update(path_len=math.nan, x_star=math.nan, converged="", flag=p.error)
            else:
                row.update(path_len=routed[u.user_id].length, x_star=result.x_star[u.user_id],
                           converged=int(result.converged), flag="")
            rows.append(row)

    fh, w = _writer(out / "trace.csv")
    with fh:
        w.writerow(TRACE_COLUMNS)
        for r in rows:
            w.writerow([_cell(r[c]) for c in TRACE_COLUMNS])
    return rows
