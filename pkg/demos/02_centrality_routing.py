"""Score nodes by betweenness and eigenvector centrality, then pick the
least and most congestion-exposed geodesics for a few users.

    python3 demos/02_centrality_routing.py
"""
import numpy as np

from tvcn import EvolutionParams, evolve
from tvcn.centrality import score_graph
from tvcn.routing import all_shortest_paths, random_user_pairs, select_extremal_paths

g, _, _ = evolve(EvolutionParams(steps=495, seed=1))
scores = score_graph(g)
top = np.argsort(scores.eigenvector)[::-1][:5]
print("principal eigenvalue", round(scores.kappa, 4))
print("most central nodes:", [(int(v), round(float(scores.eigenvector[v]), 3)) for v in top])

adj = g.undirected_adjacency()
for user in random_user_pairs(g, 5, np.random.default_rng(1), adj):
    paths = all_shortest_paths(adj, user.source, user.dest)
    lo, hi = select_extremal_paths(paths, scores, "theta_gr")
    print(f"{user.user_id} {user.source}->{user.dest}: {len(paths)} geodesics of length {lo.length}")
    print(f"  min theta_gr {lo.score.theta_gr:.4f} via {lo.nodes}")
    print(f"  max theta_gr {hi.score.theta_gr:.4f} via {hi.nodes}")
