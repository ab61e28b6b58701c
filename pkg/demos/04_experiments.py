"""Run the three packaged scenarios at a small size and write their CSVs
under demo_out/.

    python3 demos/04_experiments.py
"""
from tvcn.experiments import (ScenarioConfig, run_degree_experiment, run_extremal_comparison,
                              run_rate_trace_experiment)

cfg = ScenarioConfig(outputs="demo_out").with_overrides(sizes=(500,), epochs=3,
                                                        snapshot_interval=200)

rows = run_degree_experiment(cfg, "demo_out/degree")
for r in rows:
    print(f"beta={r['beta']:g} gamma={r['gamma']:g}: sim {r['alpha_sim']:.3f} theory {r['alpha_theory']:.3f}")

summary = run_extremal_comparison(cfg, "demo_out/extremal")
print(f"min-theta_gr rate >= max-theta_gr rate for {summary.fraction_min_ge_max():.0%} of users, "
      f"median ratio {summary.median_ratio():.3f}")

for r in run_rate_trace_experiment(cfg, "demo_out/trace"):
    print(f"epoch {r['epoch']} N={r['num_nodes']} {r['user']}: x*={r['x_star']:.4f} {r['flag']}")
