"""Grow a network, look at its in-degree tail and compare the fitted
exponent with the mean-field prediction.

    python3 demos/01_evolve_and_fit.py
"""
from tvcn import EvolutionParams, evolve
from tvcn.analysis import InsufficientData, degree_distribution, fit_power_law, theoretical_exponents

for beta, gamma in [(0.5, 0.5), (0.6, 0.5), (0.9, 0.9)]:
    params = EvolutionParams(beta=beta, gamma=gamma, steps=1995, seed=0)
    g, reports, _ = evolve(params)
    hist = degree_distribution(g, "in")
    theory = theoretical_exponents(params)
    print(f"beta={beta} gamma={gamma}: {g.num_nodes} nodes, {g.edge_count} links, "
          f"max in-degree {max(hist.degrees())}")
    try:
        alpha, se = fit_power_law(hist, k_min=5)
    except InsufficientData as exc:
        print("  no fit:", exc)
        continue
    print(f"  fitted alpha {alpha:.3f} +- {se:.3f}, mean-field alpha {theory.alpha:.3f}")

# The tail thins out when deletions nearly cancel additions.
sparse = EvolutionParams(beta=0.25, gamma=0.7, steps=1995, seed=0)
g, _, _ = evolve(sparse)
print(f"beta=0.25 gamma=0.7: only {g.edge_count} links on {g.num_nodes} nodes")
