"""Benchmark harness: seeded sweeps over game parameters, CSV/JSON results.

A sweep runs one method over a grid of values for one parameter, repeating
each point over seeded instances, and records objective, status, wall time
and iteration count per run. Failures are captured in the record rather
than aborting the sweep. Presets mirror the runtime-curve experiments at a
reduced scale.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import games as games_mod
from .ambiguity import Distribution, WassersteinBall
from .baselines import bayesian_mip, enumeration_lp_baseline
from .finite import BigMConfig, solve_wasserstein_finite_mip
from .game import FiniteUniverse, GameInstance
from .incremental import AlgorithmConfig, default_oracle, run_algorithm1

METHODS = ("dr_mip_finite", "dr_algorithm1", "enum_lp", "bayesian")
FAMILIES = ("inspection", "cournot", "synthetic")

CSV_COLUMNS = ["family", "method", "sweep_var", "sweep_value", "seed",
               "status", "objective", "wall_time_s", "iterations"]


@dataclass
class ExperimentConfig:
    family: str
    method: str
    sweep_var: str
    sweep_values: list
    family_params: dict = field(default_factory=dict)
    theta: float = 0.1
    exponent: float = 2.0
    big_m: float = 2.0
    nominal: str = "uniform"          # or "random": random weight vector
    time_limit: float = 1000.0
    repetitions: int = 10
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.sweep_values:
            raise ValueError("sweep_values must be non-empty")
        if self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass
class ExperimentRecord:
    family: str
    method: str
    sweep_var: str
    sweep_value: float
    seed: int
    status: str              # ok | timeout | unconverged | error
    objective: float | None
    wall_time_s: float
    iterations: int | None


def _build_game(cfg: ExperimentConfig, sweep_value, seed: int) -> GameInstance:
    params = dict(cfg.family_params)
    if cfg.sweep_var != "theta":
        params[cfg.sweep_var] = sweep_value
    params["seed"] = seed
    if cfg.family == "inspection":
        return games_mod.gen_inspection(games_mod.InspectionParams(**params))
    if cfg.family == "cournot":
        return games_mod.gen_cournot(games_mod.CournotParams(**params))
    return games_mod.gen_synthetic(games_mod.SyntheticParams(**params))


def _nominal(cfg: ExperimentConfig, game: GameInstance, seed: int) -> Distribution:
    support = game.nominal_utilities()
    if cfg.nominal == "uniform":
        return Distribution.uniform(support)
    rng = np.random.default_rng(seed + 17)
    weights = rng.uniform(size=len(support))
    return Distribution(support, weights / weights.sum())


def _as_finite(game: GameInstance) -> GameInstance:
    """Finite-support methods on a family universe use its nominal members."""
    if isinstance(game.universe, FiniteUniverse):
        return game
    return GameInstance(game.u_l, FiniteUniverse(game.nominal_utilities()),
                        name=game.name)


def run_one(cfg: ExperimentConfig, sweep_value, seed: int,
            backend=None) -> ExperimentRecord:
    theta = float(sweep_value) if cfg.sweep_var == "theta" else cfg.theta
    t0 = time.perf_counter()
    status, objective, iterations = "ok", None, None
    try:
        game = _build_game(cfg, sweep_value, seed)
        nu = _nominal(cfg, game, seed)
        ball = WassersteinBall(nu, theta, cfg.exponent)
        mip_cfg = BigMConfig(big_m=cfg.big_m)
        if cfg.method == "dr_algorithm1":
            alg_cfg = AlgorithmConfig(big_m=cfg.big_m, time_limit=cfg.time_limit)
            sol = run_algorithm1(game, ball, default_oracle(game, ball), alg_cfg,
                                 backend=backend)
            objective = sol.value
            iterations = sol.diagnostics["n_iterations"]
            if sol.diagnostics["status"] != "ok":
                status = ("timeout" if sol.diagnostics["status"] == "timeout"
                          else "unconverged")
        else:
            fgame = _as_finite(game)
            fball = WassersteinBall(Distribution(fgame.nominal_utilities(), nu.weights),
                                    theta, cfg.exponent)
            if cfg.method == "dr_mip_finite":
                sol = solve_wasserstein_finite_mip(fgame, fball, mip_cfg, backend=backend)
            elif cfg.method == "enum_lp":
                sol = enumeration_lp_baseline(fgame, fball, mip_cfg, backend=backend)
            else:
                sol = bayesian_mip(fgame, nu, mip_cfg, backend=backend)
            objective = sol.value
    except Exception:
        status = "error"
    wall = time.perf_counter() - t0
    if status == "ok" and wall > cfg.time_limit:
        status = "timeout"
    return ExperimentRecord(cfg.family, cfg.method, cfg.sweep_var, float(sweep_value),
                            seed, status, objective, wall, iterations)


def _warm_up(backend=None) -> None:
    """Pay scipy's lazy solver imports before anything is timed."""
    from . import solver
    from .solver import MixedIntegerProgram

    prog = MixedIntegerProgram(sense="max", name="warmup")
    prog.add_binary_var(obj=1.0)
    solver.solve_milp(prog, backend=backend)


def run_sweep(cfg: ExperimentConfig, backend=None) -> list[ExperimentRecord]:
    """One record per (sweep value, repetition); never aborts on a bad run."""
    _warm_up(backend)
    # seeds depend on the repetition only, so sweeping a non-structural
    # parameter (e.g. the radius) reuses the same instances point to point
    jobs = []
    for value in cfg.sweep_values:
        for rep in range(cfg.repetitions):
            jobs.append((value, cfg.seed + rep))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(run_one, cfg, v, s, backend) for v, s in jobs]
            return [f.result() for f in futures]
    return [run_one(cfg, v, s, backend) for v, s in jobs]


def summarize(records: list[ExperimentRecord]) -> list[dict]:
    """Mean and standard deviation of wall time and objective per sweep value."""
    by_value: dict[float, list[ExperimentRecord]] = {}
    for rec in records:
        by_value.setdefault(rec.sweep_value, []).append(rec)
    out = []
    for value in sorted(by_value):
        recs = by_value[value]
        times = np.array([r.wall_time_s for r in recs])
        objs = np.array([r.objective for r in recs if r.objective is not None])
        out.append({
            "sweep_value": value,
            "runs": len(recs),
            "ok": sum(1 for r in recs if r.status == "ok"),
            "time_mean": float(times.mean()),
            "time_std": float(times.std()),
            "objective_mean": float(objs.mean()) if objs.size else None,
            "objective_std": float(objs.std()) if objs.size else None,
        })
    return out


def emit_results(records: list[ExperimentRecord], fmt: str, path) -> None:
    if not records:
        raise ValueError("no records to emit")
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in records:
                writer.writerow([
                    r.family, r.method, r.sweep_var, repr(r.sweep_value), r.seed,
                    r.status,
                    "" if r.objective is None else repr(r.objective),
                    repr(r.wall_time_s),
                    "" if r.iterations is None else r.iterations,
                ])
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([asdict(r) for r in records], fh, indent=1)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def parse_results(path) -> list[ExperimentRecord]:
    path = str(path)
    if path.endswith(".json"):
        with open(path) as fh:
            return [ExperimentRecord(**doc) for doc in json.load(fh)]
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        out = []
        for row in reader:
            out.append(ExperimentRecord(
                row["family"], row["method"], row["sweep_var"],
                float(row["sweep_value"]), int(row["seed"]), row["status"],
                float(row["objective"]) if row["objective"] else None,
                float(row["wall_time_s"]),
                int(row["iterations"]) if row["iterations"] else None,
            ))
        return out


# -- built-in SVG line plot ----------------------------------------------------


def emit_plot(records: list[ExperimentRecord], path, title: str = "") -> None:
    """Mean wall time vs sweep value with one-standard-deviation error bars."""
    stats = summarize(records)
    xs = [s["sweep_value"] for s in stats]
    ys = [s["time_mean"] for s in stats]
    es = [s["time_std"] for s in stats]
    width, height, pad = 640, 420, 60
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(y + e for y, e in zip(ys, es)) or 1.0
    x_span = (x_hi - x_lo) or 1.0

    def px(x):
        return pad + (x - x_lo) / x_span * (width - 2 * pad)

    def py(y):
        return height - pad - (y - y_lo) / (y_hi - y_lo or 1.0) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" y2="{height-pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" stroke="black"/>']
    pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for x, y, e in zip(xs, ys, es):
        parts.append(f'<line x1="{px(x):.1f}" y1="{py(y-e):.1f}" x2="{px(x):.1f}" '
                     f'y2="{py(y+e):.1f}" stroke="steelblue"/>')
        parts.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="steelblue"/>')
        parts.append(f'<text x="{px(x):.1f}" y="{height-pad+18}" font-size="11" '
                     f'text-anchor="middle">{x:g}</text>')
    for frac in (0.0, 0.5, 1.0):
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(f'<text x="{pad-8}" y="{py(yv):.1f}" font-size="11" '
                     f'text-anchor="end">{yv:.3g}</text>')
    if title:
        parts.append(f'<text x="{width/2}" y="{pad/2}" font-size="14" '
                     f'text-anchor="middle">{title}</text>')
    parts.append(f'<text x="{width/2}" y="{height-12}" font-size="12" '
                 f'text-anchor="middle">sweep value</text>')
    parts.append(f'<text x="16" y="{height/2}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 16 {height/2})">mean wall time (s)</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))


# -- presets -------------------------------------------------------------------
# Named after the runtime-curve figures, scaled down so a laptop finishes in
# minutes. `scale` in (0, 1] shrinks instance sizes further.


def _scaled(values, scale, lo=1):
    return [max(lo, int(round(v * scale))) for v in values]


def preset(name: str, scale: float = 0.5, repetitions: int = 3) -> ExperimentConfig:
    base = dict(time_limit=60.0, repetitions=repetitions, seed=0)
    if name == "fig2a":    # inspection: runtime vs leader subset cap
        return ExperimentConfig("inspection", "dr_algorithm1", "p", [1, 2, 3],
                                family_params={"s": 5, "q": 2, "k": 2}, **base)
    if name == "fig2b":    # inspection: runtime vs follower subset cap
        return ExperimentConfig("inspection", "dr_algorithm1", "q", [1, 2, 3],
                                family_params={"s": 5, "p": 1, "k": 2}, **base)
    if name == "fig2c":    # inspection: runtime vs nominal count
        return ExperimentConfig("inspection", "dr_algorithm1", "k", [1, 2, 3, 4],
                                family_params={"s": 5, "p": 1, "q": 2}, **base)
    if name == "fig2d":    # inspection: runtime vs radius
        return ExperimentConfig("inspection", "dr_algorithm1", "theta",
                                [0.0, 0.5, 1.0, 2.0],
                                family_params={"s": 4, "p": 1, "q": 2, "k": 2}, **base)
    if name == "figA1a":   # cournot: runtime vs action count
        return ExperimentConfig("cournot", "dr_mip_finite", "n",
                                _scaled([4, 8, 12], scale, lo=2),
                                family_params={"k": 3}, **base)
    if name == "figA1b":   # cournot: runtime vs nominal count
        return ExperimentConfig("cournot", "dr_mip_finite", "k", [1, 2, 4, 6],
                                family_params={"n": 4}, **base)
    if name == "figA1c":   # cournot: runtime vs radius
        return ExperimentConfig("cournot", "dr_mip_finite", "theta",
                                [0.0, 0.5, 1.0, 2.0],
                                family_params={"n": 5, "k": 4}, **base)
    if name == "figA2a":   # synthetic: runtime vs leader actions
        return ExperimentConfig("synthetic", "dr_mip_finite", "n",
                                _scaled([10, 30, 60], scale, lo=2),
                                family_params={"m": 6, "k": 3}, **base)
    if name == "figA2b":   # synthetic: runtime vs follower actions
        return ExperimentConfig("synthetic", "dr_mip_finite", "m",
                                _scaled([4, 8, 12], scale, lo=2),
                                family_params={"n": 8, "k": 3}, **base)
    if name == "figA2c":   # synthetic: runtime vs nominal count
        return ExperimentConfig("synthetic", "dr_mip_finite", "k", [1, 2, 4, 6],
                                family_params={"n": 5, "m": 4}, **base)
    if name == "figA2d":   # synthetic: runtime vs radius
        return ExperimentConfig("synthetic", "dr_mip_finite", "theta",
                                [0.0, 0.5, 1.0, 2.0],
                                family_params={"n": 5, "m": 4, "k": 4}, **base)
    raise ValueError(f"unknown preset {name!r}")


PRESET_NAMES = ("fig2a", "fig2b", "fig2c", "fig2d",
                "figA1a", "figA1b", "figA1c",
                "figA2a", "figA2b", "figA2c", "figA2d")
