"""Time-varying communication networks.

Growth of directed scale-free networks with link rewiring and deletion,
centrality-scored routing, and Kelly-style rate control.
"""
from .analysis import (DegreeHistogram, TheoryExponents, compare_sim_theory, degree_distribution,
                       fit_power_law, theoretical_exponents)
from .centrality import (CentralityScores, PathScore, betweenness_all, eigenvector_all, path_scores,
                         score_graph)
from .evolution import (EvolutionParams, LinkBudget, anti_preferential_victim, correlation_delta,
                        evolve, evolve_step, link_budget, preferential_target)
from .graph import DirectedGraph, GraphSnapshot, load_graph, save_graph
from .rate_control import (RateParams, RouteIncidence, UserSession, assign_gains, build_incidence,
                           integrate, link_price, network_objective, route_price,
                           willingness_to_pay)
from .routing import (CapacityModel, RoutePath, UserPair, all_shortest_paths, initial_rates,
                      link_capacity, select_extremal_paths)

__version__ = "0.1.0"
