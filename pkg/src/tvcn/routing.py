"""Geodesic enumeration, extremal route selection, capacities and initial rates."""
from __future__ import annotations

import csv
import logging
from collections import Counter, deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .centrality import CentralityScores, PathScore, largest_component, path_scores
from .graph import DirectedGraph

logger = logging.getLogger(__name__)

MAX_PATHS = 10_000


class NoRoute(LookupError):
    pass


class TooManyPaths(RuntimeError):
    pass


@dataclass(frozen=True)
class UserPair:
    user_id: str
    source: int
    dest: int

    def __post_init__(self):
        if self.source == self.dest:
            raise ValueError(f"user {self.user_id}: source equals destination ({self.source})")


@dataclass(frozen=True)
class RoutePath:
    nodes: tuple[int, ...]
    score: PathScore | None = None

    @property
    def links(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def length(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class CapacityModel:
    """Link capacity ``b * (k_m * k_n) ** exponent``; node capacity is in-degree.

    ``node_floor`` raises every node capacity to at least that value. The
    default 0 keeps nodes without in-links at zero capacity.
    """

    b: float = 1.0
    exponent: float = 1.0
    node_floor: float = 0.0

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"capacity coefficient must be positive, got {self.b}")
        if self.node_floor < 0:
            raise ValueError("node_floor must be non-negative")


def bfs_distances(adj: Sequence[Sequence[int]], source: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def all_shortest_paths(g: DirectedGraph | Sequence[Sequence[int]], source: int, dest: int,
                       max_paths: int = MAX_PATHS) -> list[RoutePath]:
    """Every geodesic from ``source`` to ``dest`` on the undirected view.

    Paths are rebuilt from the BFS predecessor DAG and returned in
    lexicographic node order.

    Raises
    ------
    NoRoute
        If the two nodes are not connected.
    TooManyPaths
        If more than ``max_paths`` geodesics exist.
    """
    adj = g.undirected_adjacency() if isinstance(g, DirectedGraph) else g
    n = len(adj)
    for v in (source, dest):
        if not 0 <= v < n:
            raise NoRoute(f"unknown node {v}")
    if source == dest:
        raise ValueError("source equals destination")

    dist = [-1] * n
    sigma = [0] * n
    preds: dict[int, list[int]] = {}
    dist[source] = 0
    sigma[source] = 1
    queue = deque([source])
    while queue:
        v = queue.popleft()
        if dist[v] >= dist[dest] >= 0:
            break
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds.setdefault(w, []).append(v)
    if dist[dest] < 0:
        raise NoRoute(f"no route from {source} to {dest}")
    if sigma[dest] > max_paths:
        raise TooManyPaths(f"{sigma[dest]} geodesics from {source} to {dest} exceed {max_paths}")

    paths: list[tuple[int, ...]] = []
    stack = [(dest, (dest,))]
    while stack:
        v, tail = stack.pop()
        if v == source:
            paths.append(tail)
            continue
        for u in preds[v]:
            stack.append((u, (u,) + tail))
    paths.sort()
    return [RoutePath(p) for p in paths]


def score_paths(paths: Iterable[RoutePath], scores: CentralityScores) -> list[RoutePath]:
    return [RoutePath(p.nodes, path_scores(p.nodes, scores)) for p in paths]


def select_extremal_paths(paths: Sequence[RoutePath], scores: CentralityScores | None = None,
                          key: str = "theta_gr") -> tuple[RoutePath, RoutePath]:
    """Routes with the smallest and largest score ``key``.

    Ties on the score go to the lexicographically smaller node sequence, for
    both the minimum and the maximum. Scores equal to 12 significant digits
    count as tied, so summation order cannot break a symmetric tie.
    """
    if not paths:
        raise ValueError("no paths to select from")
    if scores is not None:
        paths = score_paths(paths, scores)
    if any(p.score is None for p in paths):
        raise ValueError("paths must be scored")
    lo = min(paths, key=lambda p: (_quantize(p.score.value(key)), p.nodes))
    hi = min(paths, key=lambda p: (-_quantize(p.score.value(key)), p.nodes))
    return lo, hi


def _quantize(value: float) -> float:
    return float(f"{value:.12g}")


def link_capacity(g: DirectedGraph, m: int, n: int, model: CapacityModel = CapacityModel()) -> float:
    km, kn = g.degree(m), g.degree(n)
    if km == 0 or kn == 0:
        logger.warning("link (%d, %d) has a zero-degree endpoint; capacity 0", m, n)
        return 0.0
    return model.b * float(km * kn) ** model.exponent


def node_capacity(g: DirectedGraph, v: int, model: CapacityModel = CapacityModel()) -> float:
    return max(float(g.in_degree(v)), model.node_floor)


def initial_rates(user_paths: Mapping[str, Sequence[int]], g: DirectedGraph,
                  model: CapacityModel = CapacityModel()) -> dict[str, float]:
    """Starting rate of each user from shared node forwarding capacity.

    A node carrying ``w`` selected routes offers each of them
    ``in_degree / w``; a user starts at the minimum offer along its route.
    """
    occurrences = Counter(v for nodes in user_paths.values() for v in set(nodes))
    rates: dict[str, float] = {}
    for user, nodes in user_paths.items():
        x = min(node_capacity(g, v, model) / occurrences[v] for v in nodes)
        if x == 0:
            logger.warning("user %s crosses a zero-capacity node; initial rate 0", user)
        rates[user] = x
    return rates


def random_user_pairs(g: DirectedGraph, k: int, rng: np.random.Generator,
                      adj: Sequence[Sequence[int]] | None = None) -> list[UserPair]:
    """``k`` distinct ordered pairs drawn uniformly from the largest component."""
    if adj is None:
        adj = g.undirected_adjacency()
    comp = largest_component(adj)
    m = comp.size
    if m < 2 or k > m * (m - 1):
        raise ValueError(f"cannot draw {k} distinct pairs from a component of {m} nodes")
    seen: set[tuple[int, int]] = set()
    pairs = []
    while len(pairs) < k:
        i, j = rng.choice(m, size=2, replace=False)
        s, d = int(comp[i]), int(comp[j])
        if (s, d) in seen:
            continue
        seen.add((s, d))
        pairs.append(UserPair(f"User{len(pairs) + 1}", s, d))
    return pairs


def read_user_pairs(path: str | Path) -> list[UserPair]:
    """Read ``user_id,S,D`` lines; a header row is skipped if present."""
    pairs = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            try:
                s, d = int(row[1]), int(row[2])
            except ValueError:
                if pairs:
                    raise
                continue  # header
            pairs.append(UserPair(row[0].strip(), s, d))
    return pairs


def write_user_pairs(pairs: Iterable[UserPair], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "S", "D"])
        for p in pairs:
            w.writerow([p.user_id, p.source, p.dest])
