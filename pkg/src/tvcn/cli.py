"""Command line entry point: ``tvcn {evolve,analyze,route,rates,experiment}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analysis, centrality, evolution, rate_control
from .experiments import (ScenarioConfig, extremal_comparison, load_config, plan_routes,
                          resolve_users, run_degree_experiment, run_extremal_comparison,
                          run_rate_trace_experiment, save_config, solve_rates, write_extremal_csv,
                          write_variants_csv, _stream, GAIN_STREAM)
from .graph import load_graph, save_graph

log = logging.getLogger("tvcn")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--x", dest="X", type=int, help="links per step")
    p.add_argument("--n0", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--users", help='"random K" or a user_id,S,D csv file')
    p.add_argument("--omega", type=float, help="link price exponent")
    p.add_argument("--dt", type=float, help="Euler step")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvcn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="grow a network and save it as JSON")
    _common(p)

    p = sub.add_parser("analyze", help="degree distribution, exponents and centralities")
    _common(p)
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--k-min", type=int, default=5)

    for name, text in (("route", "min/max theta_gr routes and their rates"),
                       ("rates", "rate control along min-theta_gr routes")):
        p = sub.add_parser(name, help=text)
        _common(p)
        p.add_argument("--graph", type=Path, required=True)

    p = sub.add_parser("experiment", help="run a full scenario")
    p.add_argument("kind", choices=["degree", "trace", "extremal"])
    _common(p)
    return parser


def _config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    cfg = cfg.with_overrides(seed=args.seed, beta=args.beta, gamma=args.gamma, X=args.X,
                             n0=args.n0, steps=args.steps, omega=args.omega, dt=args.dt,
                             users=args.users)
    if args.out is not None:
        cfg = cfg.with_overrides(outputs=str(args.out))
    return cfg


def _graph_config(args, cfg: ScenarioConfig) -> ScenarioConfig:
    """Evolution parameters stored in a graph file win unless overridden on the command line."""
    _, doc = load_graph(args.graph)
    stored = {k: v for k, v in doc.get("params", {}).items()
              if k in evolution.EvolutionParams.__dataclass_fields__}
    if stored:
        cli = {k: getattr(args, k) for k in ("beta", "gamma", "X", "n0", "steps", "seed")
               if getattr(args, k) is not None}
        cfg = cfg.with_overrides(**{**stored, **cli})
    return cfg


def cmd_evolve(args, cfg: ScenarioConfig, out: Path) -> ScenarioConfig:
    g, reports, _ = evolution.evolve(cfg.evolution)
    save_graph(g, out / "graph.json", n0=cfg.evolution.n0, steps=cfg.evolution.steps,
               params=cfg.evolution.to_dict())
    evolution.write_step_reports(reports, out / "steps.csv")
    print(f"{g.num_nodes} nodes, {g.edge_count} edges -> {out / 'graph.json'}")
    return cfg


def cmd_analyze(args, cfg: ScenarioConfig, out: Path) -> ScenarioConfig:
    g, _ = load_graph(args.graph)
    cfg = _graph_config(args, cfg)
    analysis.write_distribution_csv(analysis.degree_distribution(g, "in"), out / "degree.csv")
    scores = centrality.score_graph(g)
    centrality.write_centrality_csv(scores, out / "centrality.csv")
    try:
        row = analysis.compare_sim_theory(cfg.evolution, g, k_min=args.k_min)
    except analysis.InsufficientData as exc:
        log.warning("power-law fit skipped: %s", exc)
    else:
        analysis.write_comparison_csv([row], out / "comparison.csv")
        print(f"alpha_sim={row['alpha_sim']:.4f} alpha_theory={row['alpha_theory']:.4f}")
    print(f"kappa={scores.kappa:.6g}")
    return cfg


def cmd_route(args, cfg: ScenarioConfig, out: Path) -> ScenarioConfig:
    g, _ = load_graph(args.graph)
    cfg = _graph_config(args, cfg)
    users = resolve_users(cfg.users, g, cfg.seed)
    summary = extremal_comparison(g, users, cfg)
    write_extremal_csv(summary, out / "routes.csv")
    write_variants_csv(summary, out / "variants.csv")
    print(f"{len(users)} users -> {out / 'routes.csv'}")
    return cfg


def cmd_rates(args, cfg: ScenarioConfig, out: Path) -> ScenarioConfig:
    g, _ = load_graph(args.graph)
    cfg = _graph_config(args, cfg)
    users = resolve_users(cfg.users, g, cfg.seed)
    adj = g.undirected_adjacency()
    plans = plan_routes(adj, users, centrality.score_graph(g), keys=("theta_gr",))
    routes = {p.user.user_id: p.extremes["theta_gr"][0] for p in plans if not p.error}
    gains = rate_control.assign_gains(list(routes), _stream(cfg.seed, GAIN_STREAM))
    result = solve_rates(g, routes, gains, cfg.rate, cfg.capacity)
    rate_control.write_summary_csv(result, out / "summary.csv")
    rate_control.write_trajectory_csv(result, out / "trajectory.csv")
    print(f"converged={result.converged} residual={result.residual:.3e} t={result.t_final:g}")
    return cfg


def cmd_experiment(args, cfg: ScenarioConfig, out: Path) -> ScenarioConfig:
    if args.kind == "degree":
        rows = run_degree_experiment(cfg, out)
        for r in rows:
            print(f"beta={r['beta']:g} gamma={r['gamma']:g} N={r['N']}: "
                  f"alpha_sim={r['alpha_sim']:.4f} alpha_theory={r['alpha_theory']:.4f}")
    elif args.kind == "trace":
        rows = run_rate_trace_experiment(cfg, out)
        print(f"{len(rows)} rows -> {out / 'trace.csv'}")
    else:
        summary = run_extremal_comparison(cfg, out)
        print(f"min >= max for {summary.fraction_min_ge_max():.2%} of users, "
              f"median ratio {summary.median_ratio():.4f}")
    return cfg


COMMANDS = {"evolve": cmd_evolve, "analyze": cmd_analyze, "route": cmd_route,
            "rates": cmd_rates, "experiment": cmd_experiment}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        out = Path(cfg.outputs)
        out.mkdir(parents=True, exist_ok=True)
        # commands reading a graph file may adopt its stored parameters
        cfg = COMMANDS[args.command](args, cfg, out)
        save_config(cfg, out / "config.json")
    except (ValueError, LookupError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"tvcn: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
