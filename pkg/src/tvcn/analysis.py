"""Degree distributions, power-law fits and mean-field exponents."""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal

import numpy as np

from .evolution import EvolutionParams
from .graph import DirectedGraph

DegreeMode = Literal["in", "out", "total"]


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class DegreeHistogram:
    entries: dict[int, int]
    total: int

    def degrees(self) -> np.ndarray:
        """Expand back into one degree per node, sorted."""
        ks = sorted(self.entries)
        return np.repeat(np.array(ks, dtype=np.int64), [self.entries[k] for k in ks])

    def rows(self) -> list[tuple[int, int, float, float]]:
        """``(k, count, pdf, ccdf)`` with ``ccdf = P(K >= k)``."""
        out = []
        remaining = self.total
        for k in sorted(self.entries):
            n = self.entries[k]
            out.append((k, n, n / self.total, remaining / self.total))
            remaining -= n
        return out


@dataclass(frozen=True)
class TheoryExponents:
    c: float
    theta1: float
    theta2: float
    alpha: float
    positivity: float

    @property
    def theta1_valid(self) -> bool:
        return 0.5 < self.theta1 < 1.0

    @property
    def positivity_valid(self) -> bool:
        return self.positivity > 0.0

    @property
    def valid(self) -> bool:
        return self.theta1_valid and self.positivity_valid


def degree_distribution(g: DirectedGraph, mode: DegreeMode = "in") -> DegreeHistogram:
    if mode == "in":
        deg = g.in_degrees()
    elif mode == "out":
        deg = g.out_degrees()
    elif mode == "total":
        deg = g.degrees()
    else:
        raise ValueError(f"unknown degree mode {mode!r}")
    counts = Counter(int(k) for k in deg)
    return DegreeHistogram(entries=dict(sorted(counts.items())), total=g.num_nodes)


def histogram_from_degrees(degrees: Iterable[int]) -> DegreeHistogram:
    counts = Counter(int(k) for k in degrees)
    return DegreeHistogram(entries=dict(sorted(counts.items())), total=sum(counts.values()))


def theoretical_exponents(params: EvolutionParams) -> TheoryExponents:
    """Mean-field in-degree exponents for the given growth parameters.

    ``alpha`` is stored as the positive magnitude ``1 + 1/theta1`` of the
    density exponent.
    """
    beta, gamma, X = params.beta, params.gamma, params.X
    c = beta + (1 - beta) * (2 * gamma - 1)
    if c <= 0:
        raise ValueError(f"degenerate parameters: c = {c}")
    theta1 = (beta + gamma * (1 - beta)) / (2 * c)
    theta2 = -(1 - beta) * (1 - gamma) * X
    return TheoryExponents(
        c=c,
        theta1=theta1,
        theta2=theta2,
        alpha=1.0 + 1.0 / theta1,
        positivity=X + theta2 / theta1,
    )


def fit_power_law(hist: DegreeHistogram, k_min: int = 5) -> tuple[float, float]:
    """Maximum-likelihood exponent of the tail ``k >= k_min``.

    Uses the continuous approximation for integer data,
    ``alpha = 1 + n / sum(ln(k / (k_min - 1/2)))``, with standard error
    ``(alpha - 1) / sqrt(n)``.

    Raises
    ------
    InsufficientData
        If fewer than five distinct degrees reach ``k_min``.
    """
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    tail = {k: n for k, n in hist.entries.items() if k >= k_min and n > 0}
    if len(tail) < 5:
        raise InsufficientData(
            f"need >= 5 distinct degrees >= {k_min}, found {len(tail)}")
    ks = np.array(list(tail), dtype=float)
    ns = np.array(list(tail.values()), dtype=float)
    n = ns.sum()
    log_sum = float(np.sum(ns * np.log(ks / (k_min - 0.5))))
    alpha = 1.0 + n / log_sum
    return alpha, (alpha - 1.0) / math.sqrt(n)


def compare_sim_theory(params: EvolutionParams, g: DirectedGraph, k_min: int = 5,
                       mode: DegreeMode = "in") -> dict:
    theory = theoretical_exponents(params)
    alpha_sim, stderr = fit_power_law(degree_distribution(g, mode), k_min)
    return {
        "beta": params.beta,
        "gamma": params.gamma,
        "X": params.X,
        "N": g.num_nodes,
        "c": theory.c,
        "theta1": theory.theta1,
        "theta2": theory.theta2,
        "alpha_theory": theory.alpha,
        "alpha_sim": alpha_sim,
        "stderr": stderr,
        "gap": abs(alpha_sim - theory.alpha),
    }


COMPARISON_COLUMNS = ["beta", "gamma", "X", "c", "theta1", "theta2",
                      "alpha_theory", "alpha_sim", "gap"]


def write_distribution_csv(hist: DegreeHistogram, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "count", "pdf", "ccdf"])
        for k, n, pdf, ccdf in hist.rows():
            w.writerow([k, n, f"{pdf:.10g}", f"{ccdf:.10g}"])


def write_comparison_csv(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARISON_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in COMPARISON_COLUMNS])


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)
