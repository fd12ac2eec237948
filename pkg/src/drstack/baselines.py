"""Reference baselines: per-mapping LP enumeration and the non-robust MIP.

The LP enumeration solves one program per best-response selection (the same
program the direct ball MIP solves once binaries are fixed) and keeps the
best result. The Bayesian MIP drops the ambiguity set entirely and plays
against the nominal distribution; its value upper-bounds every robust value
with the same nominal.
"""

from __future__ import annotations

import itertools
import time

import numpy as np

from . import solver
from .ambiguity import Distribution, WassersteinBall, pairwise_distance_pow
from .finite import (
    BigMConfig,
    DrsssSolution,
    _ball_z_lp,
    _check_ball_support,
    _enumeration_guard,
    _finite_utilities,
    _selection_rows,
    _verify_mapping,
)
from .game import GameInstance
from .solver import INFEASIBLE, OPTIMAL, MixedIntegerProgram, NumericalFailureError


def enumeration_lp_baseline(game: GameInstance, ball: WassersteinBall,
                            cfg: BigMConfig | None = None,
                            backend=None) -> DrsssSolution:
    """Best result among the m^k per-selection LPs (same sign convention as the MIP)."""
    utilities = _check_ball_support(game, ball)
    k, m = len(utilities), game.m
    _enumeration_guard(m, k)
    cost_pow = pairwise_distance_pow(ball.metric, utilities, ball.nominal.support,
                                     ball.exponent)
    best = None
    solved = skipped = 0
    t0 = time.perf_counter()
    for z in itertools.product(range(m), repeat=k):
        lp = _ball_z_lp(game, ball, z, cost_pow)
        out = solver.solve_lp(lp, backend=backend)
        if out.status == INFEASIBLE:
            skipped += 1
            continue
        if out.status != OPTIMAL:
            raise NumericalFailureError(f"selection LP ended with status {out.status}")
        solved += 1
        value = -out.objective
        if best is None or value > best[0] + 1e-12:
            best = (value, out.x, z)
    if best is None:
        raise NumericalFailureError("no feasible selection found")
    value, point, z = best
    x = point[:game.n]
    mapping = np.array(z, dtype=int)
    _verify_mapping(game, utilities, x, mapping, "enumeration LP baseline")
    return DrsssSolution(x, float(value), mapping,
                         float(point[game.n]), point[game.n + 1: game.n + 1 + k].copy(),
                         diagnostics={"programs_solved": solved,
                                      "skipped_infeasible": skipped,
                                      "solver_time_s": time.perf_counter() - t0})


def bayesian_mip(game: GameInstance, nu: Distribution,
                 cfg: BigMConfig | None = None, backend=None) -> DrsssSolution:
    """Expected leader value against the nominal distribution alone."""
    cfg = cfg or BigMConfig()
    utilities = _finite_utilities(game)
    k, m, n = len(utilities), game.m, game.n
    if nu.k != k:
        raise ValueError("nominal distribution must cover the finite universe")
    prog = MixedIntegerProgram(sense="max", name="bayesian-mip")
    x = prog.add_vars(n, lb=0.0, ub=1.0, prefix="x")
    w = prog.add_vars(k, lb=-np.inf, prefix="w")
    prog.set_obj(w, nu.weights)
    delta = prog.add_binary_vars(m * k, prefix="d").reshape(m, k)
    prog.add_row(x, np.ones(n), "=", 1.0, name="simplex")
    _selection_rows(prog, game, utilities, x, delta, cfg.big_m)
    for j in range(k):
        for a in range(m):
            idx = np.concatenate([[w[j]], x, [delta[a, j]]]).astype(int)
            coef = np.concatenate([[1.0], -game.u_l[:, a], [cfg.big_m]])
            prog.add_row(idx, coef, "<=", cfg.big_m, name=f"w{j}_a{a}")
    out = solver.solve_milp(prog, backend=backend)
    if out.status != OPTIMAL:
        raise NumericalFailureError(f"Bayesian MIP ended with status {out.status}")
    xval = out.x[x]
    mapping = np.array([int(np.argmax(out.x[delta[:, j]])) for j in range(k)])
    _verify_mapping(game, utilities, xval, mapping, "Bayesian MIP")
    return DrsssSolution(xval, float(out.objective), mapping,
                         diagnostics={"solver_time_s": out.wall_time_s})
