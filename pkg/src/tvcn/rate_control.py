"""Kelly-style primal rate control over fixed routes.

Each user ``r`` pays ``P_r`` per unit time and adjusts its rate as

    dx_r/dt = gain_r * (P_r - x_r * sum_{e in r} psi_e)

where the price of link ``e`` is ``psi_e = (y_e / C_e) ** omega`` for the
aggregate flow ``y_e`` on it. The fixed point ``P_r = x_r * psi_r`` does not
depend on the gains, which only set the speed of convergence.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import DirectedGraph
from .routing import CapacityModel, RoutePath, link_capacity

logger = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e6


class RateDivergence(RuntimeError):
    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class RateParams:
    pay_a: float = 1.0
    pay_b: float = 0.5
    omega: float = 2.0
    dt: float = 0.01
    t_max: float = 1000.0
    tol: float = 1e-6
    sample_every: int = 100
    # re-evaluate the payment from the current rate at every step
    reprice_pay: bool = False

    def __post_init__(self):
        if not self.pay_a > 0:
            raise ValueError("pay_a must be positive")
        if not 0 < self.pay_b < 1:
            raise ValueError("pay_b must lie in (0, 1)")
        if not self.dt > 0 or not self.tol > 0 or not self.t_max > 0:
            raise ValueError("dt, tol and t_max must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")


@dataclass
class UserSession:
    user_id: str
    route: RoutePath
    pay: float = 0.0
    gain: float = 1.0
    rate: float = 0.0
    trajectory: list[tuple[float, float]] = field(default_factory=list)

    @property
    def links(self) -> list[tuple[int, int]]:
        return [link_key(m, n) for m, n in self.route.links]


@dataclass
class RouteIncidence:
    users: list[UserSession]
    links: list[tuple[int, int]]
    capacities: np.ndarray
    membership: dict[tuple[int, int], list[int]]

    def matrix(self) -> np.ndarray:
        """Link-by-user 0/1 incidence matrix."""
        m = np.zeros((len(self.links), len(self.users)))
        index = {e: i for i, e in enumerate(self.links)}
        for e, members in self.membership.items():
            m[index[e], members] = 1.0
        return m


@dataclass
class RateResult:
    x_star: dict[str, float]
    converged: bool
    residual: float
    residuals: dict[str, float]
    t_final: float
    steps: int
    clamp_events: int
    trajectories: dict[str, list[tuple[float, float, float]]]


def link_key(m: int, n: int) -> tuple[int, int]:
    """Links are undirected for pricing: both directions share capacity."""
    return (m, n) if m < n else (n, m)


def willingness_to_pay(x_r0: float, pay_a: float, pay_b: float) -> float:
    if x_r0 < 0:
        raise ValueError("rate must be non-negative")
    if x_r0 == 0:
        logger.warning("zero initial rate: user pays nothing and is excluded")
        return 0.0
    if math.isinf(x_r0):
        return pay_a
    return x_r0 * pay_a / (x_r0 + pay_b)


def link_price(y: float | np.ndarray, capacity: float | np.ndarray, omega: float):
    c = np.asarray(capacity, dtype=float)
    if np.any(c <= 0):
        raise ValueError("link capacity must be positive")
    out = (np.asarray(y, dtype=float) / c) ** omega
    return float(out) if out.ndim == 0 else out


def route_price(user: UserSession | Sequence[tuple[int, int]],
                prices: Mapping[tuple[int, int], float]) -> float:
    links = user.links if isinstance(user, UserSession) else [link_key(*e) for e in user]
    if not links:
        raise ValueError("route has no links")
    return float(sum(prices[e] for e in links))


def build_incidence(sessions: Sequence[UserSession], capacities: Mapping[tuple[int, int], float]
                    ) -> RouteIncidence:
    membership: dict[tuple[int, int], list[int]] = {}
    for i, s in enumerate(sessions):
        if not s.links:
            raise ValueError(f"user {s.user_id} has an empty route")
        for e in s.links:
            membership.setdefault(e, []).append(i)
    links = sorted(membership)
    missing = [e for e in links if e not in capacities]
    if missing:
        raise KeyError(f"no capacity for links {missing[:5]}")
    caps = np.array([capacities[e] for e in links], dtype=float)
    return RouteIncidence(list(sessions), links, caps, membership)


def graph_capacities(g: DirectedGraph, sessions: Iterable[UserSession],
                     model: CapacityModel = CapacityModel()) -> dict[tuple[int, int], float]:
    return {e: link_capacity(g, *e, model) for s in sessions for e in s.links}


def assign_gains(user_ids: Sequence[str], rng: np.random.Generator) -> dict[str, float]:
    draws = rng.uniform(1.0, 10.0, size=len(user_ids))
    return {u: float(x) for u, x in zip(user_ids, draws)}


def integrate(incidence: RouteIncidence, params: RateParams = RateParams()) -> RateResult:
    """Explicit Euler integration of the rate dynamics to a fixed point.

    Rates are clamped at zero. Stops when ``max |dx| / dt < tol`` or at
    ``t_max``; user sessions are updated in place with their final rate and
    sampled trajectory.

    Raises
    ------
    RateDivergence
        If any rate exceeds 1e6.
    """
    users = incidence.users
    a = incidence.matrix()
    at = a.T.copy()
    caps = incidence.capacities
    x = np.array([u.rate for u in users], dtype=float)
    pay = np.array([u.pay for u in users], dtype=float)
    gain = np.array([u.gain for u in users], dtype=float)
    omega, dt, tol = params.omega, params.dt, params.tol
    if np.any(x < 0):
        raise ValueError("initial rates must be non-negative")

    def route_prices(x):
        return at @ ((a @ x) / caps) ** omega

    max_steps = int(math.ceil(params.t_max / dt))
    traces: dict[str, list[tuple[float, float, float]]] = {u.user_id: [] for u in users}

    def record(step, x, psi):
        t = step * dt
        for i, u in enumerate(users):
            traces[u.user_id].append((t, float(x[i]), float(psi[i])))

    clamps = 0
    converged = False
    step = 0
    psi = route_prices(x)
    record(0, x, psi)
    while step < max_steps:
        if params.reprice_pay:
            pay = np.where(x > 0, x * params.pay_a / (x + params.pay_b), 0.0)
        nxt = x + gain * (pay - x * psi) * dt
        neg = nxt < 0
        if neg.any():
            clamps += int(neg.sum())
            nxt[neg] = 0.0
        step += 1
        change = np.max(np.abs(nxt - x)) / dt
        x = nxt
        psi = route_prices(x)
        if not np.all(np.isfinite(x)) or np.any(x > DIVERGENCE_LIMIT):
            record(step, x, psi)
            raise RateDivergence(f"rates diverged at t={step * dt:g}",
                                 trace=[traces[u.user_id] for u in users])
        if step % params.sample_every == 0:
            record(step, x, psi)
        if change < tol:
            converged = True
            break
    if step % params.sample_every:
        record(step, x, psi)
    if clamps:
        logger.info("%d negative-rate clamp events", clamps)
    if not converged:
        logger.warning("rate control did not converge by t=%g", params.t_max)

    res = np.abs(pay - x * psi)
    for i, u in enumerate(users):
        u.rate = float(x[i])
        u.pay = float(pay[i])
        u.trajectory = [(t, xr) for t, xr, _ in traces[u.user_id]]
    return RateResult(
        x_star={u.user_id: float(x[i]) for i, u in enumerate(users)},
        converged=converged,
        residual=float(res.max()) if res.size else 0.0,
        residuals={u.user_id: float(res[i]) for i, u in enumerate(users)},
        t_final=step * dt,
        steps=step,
        clamp_events=clamps,
        trajectories=traces,
    )


def network_objective(users: Iterable[UserSession] | Iterable[tuple[float, float]]) -> float:
    """Weighted log utility ``sum P_r log x_r``; zero-rate users are skipped."""
    total = 0.0
    for item in users:
        pay, x = (item.pay, item.rate) if isinstance(item, UserSession) else item
        if x <= 0:
            logger.warning("zero-rate user skipped in objective")
            continue
        total += pay * math.log(x)
    return total


def lyapunov(incidence: RouteIncidence, x: np.ndarray, omega: float) -> float:
    """``sum P_r log x_r - sum_e integral_0^{y_e} psi_e``.

    Non-decreasing along the continuous-time dynamics with fixed payments.
    """
    pay = np.array([u.pay for u in incidence.users])
    y = incidence.matrix() @ x
    cost = np.sum(y ** (omega + 1) / ((omega + 1) * incidence.capacities ** omega))
    pos = x > 0
    return float(np.sum(pay[pos] * np.log(x[pos])) - cost)


def write_trajectory_csv(result: RateResult, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "user_id", "x_r", "psi_r"])
        for user, rows in result.trajectories.items():
            for t, x, psi in rows:
                w.writerow([f"{t:.6g}", user, f"{x:.10g}", f"{psi:.10g}"])


def write_summary_csv(result: RateResult, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "x_star", "residual", "converged"])
        for user, x in result.x_star.items():
            w.writerow([user, f"{x:.10g}", f"{result.residuals[user]:.3e}", int(result.converged)])
