"""Three users share a small line network. Each pays a fixed amount and the
rates settle where payment equals rate times the summed link price.

    python3 demos/03_rate_control.py
"""
import numpy as np

from tvcn.rate_control import (RateParams, UserSession, build_incidence, integrate, lyapunov,
                               network_objective)
from tvcn.routing import RoutePath

capacities = {(0, 1): 4.0, (1, 2): 2.0, (2, 3): 6.0}
users = [
    UserSession("long", RoutePath((0, 1, 2, 3)), pay=1.0, gain=2.0, rate=0.1),
    UserSession("left", RoutePath((0, 1)), pay=0.5, gain=5.0, rate=0.1),
    UserSession("middle", RoutePath((1, 2)), pay=0.8, gain=9.0, rate=0.1),
]
inc = build_incidence(users, capacities)
res = integrate(inc, RateParams(omega=2.0, sample_every=50))

for u in users:
    print(f"{u.user_id:>6}: x* = {res.x_star[u.user_id]:.5f}")
print(f"converged={res.converged} at t={res.t_final:g}, residual {res.residual:.2e}")
print("sum P log x =", round(network_objective(users), 5))

# Lyapunov value along the sampled trajectory never goes down.
ids = [u.user_id for u in users]
for k in range(0, len(res.trajectories["long"]), 2):
    x = np.array([res.trajectories[i][k][1] for i in ids])
    print(f"t={res.trajectories['long'][k][0]:6.2f}  V={lyapunov(inc, x, 2.0):+.5f}")
