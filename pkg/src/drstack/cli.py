"""Command-line harness: generate instances, solve them, run benchmark sweeps.

    drstack gen --family inspection --s 4 --p 1 --q 1 --k 2 --seed 3 --out game.json
    drstack solve --game game.json --method dr_mip_finite --theta 0.1 --out sol.json
    drstack wasserstein --game game.json --theta 0.1 --dump-iters iters.csv
    drstack sweep --preset fig2c --out results.csv
    drstack sweep --config sweep.json --format json --out results.json
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, solver
from .ambiguity import Distribution, WassersteinBall
from .baselines import bayesian_mip, enumeration_lp_baseline
from .bench import ExperimentConfig, PRESET_NAMES, emit_plot, emit_results, preset, run_sweep
from .finite import BigMConfig, solve_by_enumeration, solve_wasserstein_finite_mip
from .game import game_from_dict, game_to_dict
from .games import (
    CournotParams,
    InspectionParams,
    SyntheticParams,
    gen_cournot,
    gen_inspection,
    gen_synthetic,
)
from .incremental import AlgorithmConfig, default_oracle, dump_iteration_log, run_algorithm1


def _load_config(path: str) -> dict:
    text = Path(path).read_bytes()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        return tomllib.loads(text.decode())
    return json.loads(text.decode())


def _write_json(doc, path):
    if path:
        Path(path).write_text(json.dumps(doc, indent=1) + "\n")
    else:
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write("\n")


def _cmd_gen(args) -> int:
    if args.family == "inspection":
        game = gen_inspection(InspectionParams(args.s, args.p, args.q, args.k, args.seed))
    elif args.family == "cournot":
        game = gen_cournot(CournotParams(args.n, args.k, args.seed))
    else:
        game = gen_synthetic(SyntheticParams(args.n, args.m, args.k, args.seed))
    _write_json(game_to_dict(game), args.out)
    return 0


def _load_game_and_ball(args):
    game = game_from_dict(json.loads(Path(args.game).read_text()))
    if args.nominal_file:
        nu = Distribution.from_dict(json.loads(Path(args.nominal_file).read_text()), game)
    else:
        support = game.nominal_utilities()
        if args.nominal == "uniform":
            nu = Distribution.uniform(support)
        else:
            rng = np.random.default_rng(args.seed)
            weights = rng.uniform(size=len(support))
            nu = Distribution(support, weights / weights.sum())
    return game, WassersteinBall(nu, args.theta, args.exponent)


def _cmd_solve(args) -> int:
    if args.dump_lp:
        solver.set_debug_dump_dir(args.dump_lp)
    game, ball = _load_game_and_ball(args)
    fgame = bench._as_finite(game)
    fball = WassersteinBall(Distribution(fgame.nominal_utilities(), ball.nominal.weights),
                            ball.radius, ball.exponent)
    cfg = BigMConfig(big_m=args.big_m)
    if args.method == "dr_mip_finite":
        sol = solve_wasserstein_finite_mip(fgame, fball, cfg)
    elif args.method == "enum_lp":
        sol = enumeration_lp_baseline(fgame, fball, cfg)
    elif args.method == "dr_enumeration":
        sol = solve_by_enumeration(fgame, fball, cfg)
    elif args.method == "bayesian":
        sol = bayesian_mip(fgame, fball.nominal, cfg)
    else:
        raise SystemExit(f"unsupported method {args.method!r} for solve; "
                         "use the wasserstein subcommand for dr_algorithm1")
    _write_json(sol.to_dict(), args.out)
    return 0


def _cmd_wasserstein(args) -> int:
    if args.dump_lp:
        solver.set_debug_dump_dir(args.dump_lp)
    game, ball = _load_game_and_ball(args)
    cfg = AlgorithmConfig(big_m=args.big_m, max_iter=args.max_iter,
                          time_limit=args.time_limit)
    sol = run_algorithm1(game, ball, default_oracle(game, ball), cfg)
    if args.dump_iters:
        dump_iteration_log(sol, args.dump_iters)
    doc = sol.to_dict()
    doc["status"] = sol.diagnostics["status"]
    doc["iterations"] = sol.diagnostics["n_iterations"]
    _write_json(doc, args.out)
    return 0 if sol.diagnostics["status"] == "ok" else 3


def _cmd_sweep(args) -> int:
    if args.config:
        doc = _load_config(args.config)
        cfg = ExperimentConfig(**doc)
    elif args.preset:
        cfg = preset(args.preset, scale=args.scale)
    else:
        raise SystemExit("sweep needs --config or --preset")
    if args.time_limit is not None:
        cfg.time_limit = args.time_limit
    if args.seed is not None:
        cfg.seed = args.seed
    if args.reps is not None:
        cfg.repetitions = args.reps
    records = run_sweep(cfg)
    out = args.out or f"results.{args.format}"
    emit_results(records, args.format, out)
    if args.plot:
        emit_plot(records, args.plot, title=f"{cfg.family}/{cfg.method} vs {cfg.sweep_var}")
    for row in bench.summarize(records):
        print(f"{cfg.sweep_var}={row['sweep_value']:g}  runs={row['runs']} ok={row['ok']}  "
              f"time {row['time_mean']:.3f}s +- {row['time_std']:.3f}")
    print(f"wrote {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="drstack",
                                     description="distributionally robust Stackelberg solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a game instance as JSON")
    p_gen.add_argument("--family", choices=["inspection", "cournot", "synthetic"],
                       required=True)
    p_gen.add_argument("--s", type=int, default=3)
    p_gen.add_argument("--p", type=int, default=1)
    p_gen.add_argument("--q", type=int, default=1)
    p_gen.add_argument("--n", type=int, default=3)
    p_gen.add_argument("--m", type=int, default=3)
    p_gen.add_argument("--k", type=int, default=1)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=_cmd_gen)

    def add_solve_common(p):
        p.add_argument("--game", required=True)
        p.add_argument("--theta", type=float, default=0.1)
        p.add_argument("--exponent", "--t", type=float, default=2.0)
        p.add_argument("--big-m", type=float, default=2.0)
        p.add_argument("--nominal", choices=["uniform", "random"], default="uniform")
        p.add_argument("--nominal-file", default=None,
                       help="distribution JSON overriding the universe nominals")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--time-limit", type=float, default=1000.0)
        p.add_argument("--dump-lp", default=None, metavar="DIR")
        p.add_argument("--out", default=None)

    p_solve = sub.add_parser("solve", help="finite-support methods on a game JSON")
    add_solve_common(p_solve)
    p_solve.add_argument("--method", default="dr_mip_finite",
                         choices=["dr_mip_finite", "dr_enumeration", "enum_lp", "bayesian"])
    p_solve.set_defaults(func=_cmd_solve)

    p_wass = sub.add_parser("wasserstein", help="incremental MIP over the full universe")
    add_solve_common(p_wass)
    p_wass.add_argument("--max-iter", type=int, default=200)
    p_wass.add_argument("--dump-iters", default=None, metavar="CSV")
    p_wass.set_defaults(func=_cmd_wasserstein)

    p_sweep = sub.add_parser("sweep", help="run a benchmark sweep")
    p_sweep.add_argument("--config", default=None, metavar="TOML-OR-JSON")
    p_sweep.add_argument("--preset", choices=list(PRESET_NAMES), default=None)
    p_sweep.add_argument("--scale", type=float, default=0.5)
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--plot", default=None, metavar="SVG")
    p_sweep.add_argument("--time-limit", type=float, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--reps", type=int, default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
