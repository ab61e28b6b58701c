"""Directed graph substrate for evolving networks.

Nodes are dense integer ids in creation order and are never removed. Edges
are simple (no self-loops, no parallel edges) and kept in insertion order so
that iteration is deterministic under a fixed seed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np


class GraphError(ValueError):
    """Invalid graph operation (unknown node, self-loop, duplicate target)."""


class FrozenGraphError(GraphError):
    """Mutation attempted on a snapshot."""


class DirectedGraph:
    """Simple directed graph with O(1) degree queries.

    Degrees are mirrored in numpy arrays so that samplers can build weight
    vectors without touching Python lists.
    """

    def __init__(self, num_nodes: int = 0):
        self._out: list[list[int]] = []
        self._in: list[list[int]] = []
        self._edges: dict[tuple[int, int], None] = {}
        self._indeg = np.zeros(16, dtype=np.int64)
        self._outdeg = np.zeros(16, dtype=np.int64)
        self._frozen = False
        for _ in range(num_nodes):
            self.add_node()

    # -- queries ---------------------------------------------------------
    @property
    def num_nodes(self) -> int:
        return len(self._out)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def nodes(self) -> range:
        return range(self.num_nodes)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges in creation order."""
        return iter(self._edges)

    def has_node(self, v: int) -> bool:
        return 0 <= v < self.num_nodes

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edges

    def successors(self, v: int) -> list[int]:
        self._check_node(v)
        return list(self._out[v])

    def predecessors(self, v: int) -> list[int]:
        self._check_node(v)
        return list(self._in[v])

    def in_degree(self, v: int) -> int:
        self._check_node(v)
        return int(self._indeg[v])

    def out_degree(self, v: int) -> int:
        self._check_node(v)
        return int(self._outdeg[v])

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self._indeg[v] + self._outdeg[v])

    def in_degrees(self) -> np.ndarray:
        """Read-only view of in-degrees indexed by node id."""
        view = self._indeg[: self.num_nodes]
        view.flags.writeable = False
        return view

    def out_degrees(self) -> np.ndarray:
        view = self._outdeg[: self.num_nodes]
        view.flags.writeable = False
        return view

    def degrees(self) -> np.ndarray:
        n = self.num_nodes
        return self._indeg[:n] + self._outdeg[:n]

    def undirected_adjacency(self) -> list[list[int]]:
        """Sorted neighbour lists of the undirected view.

        A pair is adjacent if an edge exists in either direction.
        """
        nbrs: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for u, v in self._edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return [sorted(s) for s in nbrs]

    # -- mutation --------------------------------------------------------
    def add_node(self) -> int:
        self._check_mutable()
        v = len(self._out)
        self._out.append([])
        self._in.append([])
        if v >= self._indeg.shape[0]:
            size = 2 * self._indeg.shape[0]
            self._indeg = np.concatenate([self._indeg, np.zeros(size - v, np.int64)])
            self._outdeg = np.concatenate([self._outdeg, np.zeros(size - v, np.int64)])
        return v

    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``u -> v``. Returns False if the edge already exists."""
        self._check_mutable()
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise GraphError(f"self-loop rejected: ({u}, {v})")
        if (u, v) in self._edges:
            return False
        self._edges[(u, v)] = None
        self._out[u].append(v)
        self._in[v].append(u)
        self._outdeg[u] += 1
        self._indeg[v] += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        """Delete ``u -> v``. Returns False if it was not present."""
        self._check_mutable()
        if (u, v) not in self._edges:
            return False
        del self._edges[(u, v)]
        self._out[u].remove(v)
        self._in[v].remove(u)
        self._outdeg[u] -= 1
        self._indeg[v] -= 1
        return True

    def rewire_edge(self, u: int, v_old: int, v_new: int) -> bool:
        """Move ``u -> v_old`` to ``u -> v_new`` atomically.

        Returns False if ``u -> v_old`` does not exist. Raises GraphError,
        leaving the graph untouched, if the new target is invalid.
        """
        self._check_mutable()
        if (u, v_old) not in self._edges:
            return False
        self._check_node(v_new)
        if v_new == u:
            raise GraphError(f"rewire target equals source: {u}")
        if (u, v_new) in self._edges:
            raise GraphError(f"rewire target already linked: ({u}, {v_new})")
        self.remove_edge(u, v_old)
        self.add_edge(u, v_new)
        return True

    # -- copies and snapshots --------------------------------------------
    def copy(self) -> DirectedGraph:
        g = DirectedGraph.__new__(DirectedGraph)
        g._out = [list(a) for a in self._out]
        g._in = [list(a) for a in self._in]
        g._edges = dict(self._edges)
        g._indeg = self._indeg.copy()
        g._outdeg = self._outdeg.copy()
        g._frozen = False
        return g

    def snapshot(self, timestamp: int) -> GraphSnapshot:
        frozen = self.copy()
        frozen._frozen = True
        return GraphSnapshot(timestamp=timestamp, graph=frozen)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and list(self._edges) == list(other._edges)
            and self._out == other._out
            and self._in == other._in
        )

    def __repr__(self) -> str:
        return f"DirectedGraph(nodes={self.num_nodes}, edges={self.edge_count})"

    # -- helpers ---------------------------------------------------------
    def _check_node(self, v: int) -> None:
        if not (0 <= v < len(self._out)):
            raise GraphError(f"unknown node id {v}")

    def _check_mutable(self) -> None:
        if self._frozen:
            raise FrozenGraphError("snapshot graphs are immutable")


@dataclass(frozen=True, eq=False)
class GraphSnapshot:
    """Frozen copy of a graph taken at evolution step ``timestamp``."""

    timestamp: int
    graph: DirectedGraph


def complete_digraph(n: int) -> DirectedGraph:
    """Every ordered pair of the ``n`` nodes linked."""
    g = DirectedGraph(n)
    for u in range(n):
        for v in range(n):
            if u != v:
                g.add_edge(u, v)
    return g


def from_edges(num_nodes: int, edges: Iterable[tuple[int, int]]) -> DirectedGraph:
    g = DirectedGraph(num_nodes)
    for u, v in edges:
        g.add_edge(int(u), int(v))
    return g


# -- serialization -----------------------------------------------------------
def graph_to_dict(g: DirectedGraph, n0: int | None = None, steps: int | None = None,
                  params: dict | None = None) -> dict:
    n = g.num_nodes
    if n0 is None:
        n0 = n
    if steps is None:
        steps = n - n0
    return {
        "n0": int(n0),
        "steps": int(steps),
        "num_nodes": n,
        "params": dict(params or {}),
        "edges": [[u, v] for u, v in g.edges()],
    }


def graph_from_dict(data: dict) -> DirectedGraph:
    n = data.get("num_nodes")
    if n is None:
        n = int(data["n0"]) + int(data["steps"])
    return from_edges(int(n), data["edges"])


def save_graph(g: DirectedGraph, path: str | Path, **meta) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g, **meta), separators=(",", ":")) + "\n")


def load_graph(path: str | Path) -> tuple[DirectedGraph, dict]:
    """Load a graph file; returns the graph and the raw document."""
    data = json.loads(Path(path).read_text())
    return graph_from_dict(data), data
