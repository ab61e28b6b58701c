"""Growth of a directed scale-free network by expansion, rewiring and deletion.

At every step one node joins the network. A per-step link number ``X`` is
split into links added from the new node, links rewired inside the existing
network and links deleted from it. New targets are chosen preferentially by
in-degree, removed links are chosen anti-preferentially by the total degree
of their far endpoint.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Collection, Iterable

import numpy as np

from .graph import DirectedGraph, GraphSnapshot, complete_digraph

logger = logging.getLogger(__name__)


class NoEligibleNode(LookupError):
    pass


class NoRemovableLink(LookupError):
    pass


@dataclass(frozen=True)
class EvolutionParams:
    """Parameters of a network evolution run.

    Parameters
    ----------
    n0 : int
        Size of the complete seed network.
    X : int
        Links handled per step, ``1 <= X <= n0``.
    beta : float
        Fraction of ``X`` added from the new node, in ``(0, 1]``.
    gamma : float
        Fraction of the remainder that is rewired rather than deleted,
        in ``[0.5, 1]``.
    steps : int
        Number of steps ``T``; the final graph has ``n0 + T`` nodes.
    seed : int
        Seed of the numpy random generator driving the run.
    """

    n0: int = 5
    X: int = 5
    beta: float = 0.5
    gamma: float = 0.6
    steps: int = 495
    seed: int = 0

    def __post_init__(self):
        if self.n0 < 2:
            raise ValueError(f"n0 must be >= 2, got {self.n0}")
        if not 1 <= self.X <= self.n0:
            raise ValueError(f"X must satisfy 1 <= X <= n0, got X={self.X}, n0={self.n0}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        if not 0.5 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0.5, 1], got {self.gamma}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")

    @property
    def num_nodes(self) -> int:
        return self.n0 + self.steps

    def replace(self, **changes) -> EvolutionParams:
        return EvolutionParams(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LinkBudget:
    f_add: float
    f_rewire: float
    f_delete: float

    @property
    def total(self) -> float:
        return self.f_add + self.f_rewire + self.f_delete


@dataclass(frozen=True)
class StepReport:
    step: int
    n_add: int
    n_rewire: int
    n_delete: int
    skipped: int
    edge_count: int


def link_budget(params: EvolutionParams) -> LinkBudget:
    X, b, g = params.X, params.beta, params.gamma
    return LinkBudget(f_add=b * X, f_rewire=g * (1 - b) * X, f_delete=(1 - g) * (1 - b) * X)


def correlation_delta(beta: float) -> float:
    """Ratio of altered (rewired plus deleted) to added links, ``(1 - beta) / beta``."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return (1.0 - beta) / beta


def stochastic_round(value: float, rng: np.random.Generator) -> int:
    """Floor plus a Bernoulli draw on the fractional part; unbiased."""
    base = math.floor(value)
    frac = value - base
    # one draw per call, even for integral values, keeps the RNG stream aligned
    return base + int(rng.random() < frac)


def _sample(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    total = cum[-1]
    if not total > 0:
        raise NoEligibleNode("no eligible node")
    return int(np.searchsorted(cum, rng.random() * total, side="right"))


def preferential_target(g: DirectedGraph, rng: np.random.Generator,
                        exclude: Collection[int] = (), eligible: np.ndarray | None = None) -> int:
    """Draw a node with probability proportional to ``in_degree + 1``.

    Nodes in ``exclude`` get zero weight, as do nodes where the optional
    boolean mask ``eligible`` is False.
    """
    if g.num_nodes == 0:
        raise NoEligibleNode("empty graph")
    weights = g.in_degrees().astype(float) + 1.0
    if eligible is not None:
        weights[~eligible] = 0.0
    if exclude:
        weights[np.fromiter(exclude, dtype=np.int64, count=len(exclude))] = 0.0
    return _sample(weights, rng)


def anti_preferential_victim(g: DirectedGraph, source: int, rng: np.random.Generator) -> int:
    """Pick one out-neighbour of ``source`` for removal.

    Neighbour ``v`` is weighted by ``1 - k_v / sum_j k_j`` with ``k`` the
    total degree, so links towards weakly connected nodes go first.
    """
    targets = g.successors(source)
    if not targets:
        raise NoRemovableLink(f"node {source} has no removable link")
    if len(targets) == 1:
        return targets[0]
    deg = g.degrees()
    total = float(deg.sum())
    weights = 1.0 - deg[targets] / total
    if not weights.sum() > 0:
        weights = np.ones(len(targets))
    return targets[_sample(weights, rng)]


def _add_links(g: DirectedGraph, new: int, count: int, rng: np.random.Generator) -> tuple[int, int]:
    done = skipped = 0
    chosen = {new}
    for _ in range(count):
        try:
            v = preferential_target(g, rng, exclude=chosen)
        except NoEligibleNode:
            skipped += 1
            continue
        g.add_edge(new, v)
        chosen.add(v)
        done += 1
    return done, skipped


def _rewire_link(g: DirectedGraph, rng: np.random.Generator) -> bool:
    has_out = g.out_degrees() > 0
    try:
        u = preferential_target(g, rng, eligible=has_out)
    except NoEligibleNode:
        return False
    v_old = anti_preferential_victim(g, u, rng)
    try:
        v_new = preferential_target(g, rng, exclude={u, *g.successors(u)})
    except NoEligibleNode:
        return False
    return g.rewire_edge(u, v_old, v_new)


def _delete_link(g: DirectedGraph, rng: np.random.Generator) -> bool:
    sources = np.flatnonzero(g.out_degrees() > 0)
    if sources.size == 0:
        return False
    u = int(sources[rng.integers(sources.size)])
    return g.remove_edge(u, anti_preferential_victim(g, u, rng))


def evolve_step(g: DirectedGraph, params: EvolutionParams, rng: np.random.Generator,
                step: int = 0) -> StepReport:
    """Apply one expansion/rewire/delete round to ``g`` in place."""
    if g.num_nodes == 0:
        raise ValueError("cannot evolve an empty graph")
    budget = link_budget(params)
    n_add = stochastic_round(budget.f_add, rng)
    n_rewire = stochastic_round(budget.f_rewire, rng)
    n_delete = stochastic_round(budget.f_delete, rng)

    new = g.add_node()
    added, skipped = _add_links(g, new, n_add, rng)

    rewired = 0
    for _ in range(n_rewire):
        if _rewire_link(g, rng):
            rewired += 1
        else:
            skipped += 1

    deleted = 0
    for _ in range(n_delete):
        if _delete_link(g, rng):
            deleted += 1
        else:
            skipped += 1

    if skipped:
        logger.debug("step %d: %d link operations skipped", step, skipped)
    return StepReport(step, added, rewired, deleted, skipped, g.edge_count)


def seed_network(params: EvolutionParams) -> DirectedGraph:
    return complete_digraph(params.n0)


def evolve(params: EvolutionParams, graph: DirectedGraph | None = None,
           rng: np.random.Generator | None = None, snapshot_every: int | None = None,
           on_step: Callable[[StepReport], None] | None = None,
           ) -> tuple[DirectedGraph, list[StepReport], list[GraphSnapshot]]:
    """Run ``params.steps`` evolution steps.

    Starting from the complete seed digraph unless ``graph`` is given (it is
    then mutated in place and ``rng`` should carry on the same stream).
    Returns the graph, the per-step reports and the snapshots taken every
    ``snapshot_every`` steps.
    """
    g = seed_network(params) if graph is None else graph
    if rng is None:
        rng = np.random.default_rng(params.seed)
    start = g.num_nodes - params.n0
    reports: list[StepReport] = []
    snapshots: list[GraphSnapshot] = []
    for i in range(params.steps):
        t = start + i + 1
        report = evolve_step(g, params, rng, step=t)
        reports.append(report)
        if on_step is not None:
            on_step(report)
        if snapshot_every and t % snapshot_every == 0:
            snapshots.append(g.snapshot(t))
    return g, reports, snapshots


def write_step_reports(reports: Iterable[StepReport], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "n_add", "n_rewire", "n_delete", "edge_count"])
        for r in reports:
            w.writerow([r.step, r.n_add, r.n_rewire, r.n_delete, r.edge_count])
