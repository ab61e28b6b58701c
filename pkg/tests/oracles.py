"""Brute-force reference computations, independent of the package algorithms."""
from __future__ import annotations

import itertools

import numpy as np


def undirected(num_nodes, edges):
    nbrs = [set() for _ in range(num_nodes)]
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    return nbrs


def hop_distance(nbrs, s, t):
    """Plain level-by-level search, no predecessor bookkeeping."""
    frontier, seen, d = {s}, {s}, 0
    while frontier:
        if t in frontier:
            return d
        frontier = {w for v in frontier for w in nbrs[v]} - seen
        seen |= frontier
        d += 1
    return None


def geodesics(nbrs, s, t):
    """All simple paths from s to t of exactly the hop distance, by bounded DFS."""
    d = hop_distance(nbrs, s, t)
    if d is None:
        return []
    out = []

    def walk(path):
        v = path[-1]
        if len(path) - 1 == d:
            if v == t:
                out.append(tuple(path))
            return
        for w in sorted(nbrs[v]):
            if w not in path:
                walk(path + [w])

    walk([s])
    return sorted(out)


def betweenness(num_nodes, edges, normalized=True):
    nbrs = undirected(num_nodes, edges)
    bc = np.zeros(num_nodes)
    for s, t in itertools.permutations(range(num_nodes), 2):
        paths = geodesics(nbrs, s, t)
        if not paths:
            continue
        for v in range(num_nodes):
            if v in (s, t):
                continue
            bc[v] += sum(v in p for p in paths) / len(paths)
    if normalized and num_nodes > 2:
        bc /= (num_nodes - 1) * (num_nodes - 2)
    return bc


def principal_eigen(num_nodes, edges):
    a = np.zeros((num_nodes, num_nodes))
    for u, v in edges:
        a[u, v] = a[v, u] = 1.0
    w, vecs = np.linalg.eigh(a)
    x = np.abs(vecs[:, -1])
    return x / x.max(), w[-1], a
