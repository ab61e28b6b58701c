"""Betweenness, eigenvector centrality, reputation and path scores.

Both centralities are computed on the undirected view of the graph: two
nodes are adjacent when a link joins them in either direction.
"""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .graph import DirectedGraph

EIGENVECTOR_FLOOR = 1e-12


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class CentralityScores:
    betweenness: np.ndarray
    eigenvector: np.ndarray
    reputation: np.ndarray
    kappa: float

    def __len__(self) -> int:
        return len(self.betweenness)


@dataclass(frozen=True)
class PathScore:
    path: tuple[int, ...]
    theta_g: float
    theta_r: float
    theta_gr: float

    def value(self, key: str) -> float:
        return getattr(self, key)


def _adjacency(g: DirectedGraph | Sequence[Sequence[int]]) -> Sequence[Sequence[int]]:
    return g.undirected_adjacency() if isinstance(g, DirectedGraph) else g


def betweenness_all(g: DirectedGraph | Sequence[Sequence[int]], normalized: bool = True) -> np.ndarray:
    """Node betweenness over all ordered source/target pairs.

    Brandes' dependency accumulation on the undirected view. With
    ``normalized`` the sums are divided by ``(N - 1)(N - 2)``, the number of
    ordered pairs excluding the node itself.

    ``g`` may also be a precomputed list of undirected neighbour lists.
    """
    adj = _adjacency(g)
    n = len(adj)
    bc = np.zeros(n)
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    if normalized and n > 2:
        bc /= (n - 1) * (n - 2)
    return bc


def largest_component(adj: Sequence[Sequence[int]]) -> np.ndarray:
    """Sorted node ids of the largest connected component.

    Ties go to the component holding the smallest node id.
    """
    n = len(adj)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    a = _sparse_adjacency(adj)
    _, labels = connected_components(a, directed=False)
    sizes = np.bincount(labels)
    # labels are assigned in order of the lowest node id, so argmax breaks ties low
    return np.flatnonzero(labels == int(np.argmax(sizes)))


def _sparse_adjacency(adj: Sequence[Sequence[int]]) -> sparse.csr_matrix:
    n = len(adj)
    rows = np.repeat(np.arange(n), [len(a) for a in adj])
    cols = np.fromiter((w for a in adj for w in a), dtype=np.int64, count=rows.size)
    return sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))


def eigenvector_all(g: DirectedGraph | Sequence[Sequence[int]], tol: float = 1e-10,
                    max_iter: int = 100_000) -> tuple[np.ndarray, float]:
    """Principal eigenvector of the symmetric 0/1 adjacency matrix.

    Power iteration restricted to the largest connected component. The
    iteration runs on ``A + I``, which has the same eigenvectors as ``A``
    but no ``-kappa`` eigenvalue, so bipartite graphs converge too. The
    result is scaled to a maximum of 1; nodes outside the component score
    0. ``kappa`` is the Rayleigh quotient of the converged vector.

    Raises
    ------
    ConvergenceError
        If successive iterates still differ by ``tol`` after ``max_iter``.
    """
    adj = _adjacency(g)
    n = len(adj)
    x_full = np.zeros(n)
    if n == 0:
        return x_full, 0.0
    comp = largest_component(adj)
    if comp.size == 1:
        x_full[comp] = 1.0
        return x_full, 0.0
    a = _sparse_adjacency(adj)[comp][:, comp]
    x = np.ones(comp.size)
    for _ in range(max_iter):
        nxt = a @ x + x
        nxt /= nxt.max()
        if np.max(np.abs(nxt - x)) < tol:
            x = nxt
            break
        x = nxt
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")
    kappa = float(x @ (a @ x) / (x @ x))
    x_full[comp] = x
    return x_full, kappa


def score_graph(g: DirectedGraph, tol: float = 1e-10, max_iter: int = 100_000) -> CentralityScores:
    adj = g.undirected_adjacency()
    between = betweenness_all(adj)
    eig, kappa = eigenvector_all(adj, tol=tol, max_iter=max_iter)
    eig = np.maximum(eig, EIGENVECTOR_FLOOR)
    return CentralityScores(betweenness=between, eigenvector=eig, reputation=1.0 / eig, kappa=kappa)


def path_scores(path: Sequence[int], scores: CentralityScores) -> PathScore:
    """Betweenness sum, reputation sum and betweenness-eigenvector product sum."""
    nodes = tuple(int(v) for v in path)
    n = len(scores)
    for v in nodes:
        if not 0 <= v < n:
            raise KeyError(f"node {v} has no centrality score")
    idx = list(nodes)
    g = scores.betweenness[idx]
    return PathScore(
        path=nodes,
        theta_g=float(g.sum()),
        theta_r=float(scores.reputation[idx].sum()),
        theta_gr=float((g * scores.eigenvector[idx]).sum()),
    )


def write_centrality_csv(scores: CentralityScores, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "g", "x", "reputation"])
        for v in range(len(scores)):
            w.writerow([v, f"{scores.betweenness[v]:.12g}", f"{scores.eigenvector[v]:.12g}",
                        f"{scores.reputation[v]:.12g}"])
