"""Distributionally robust Stackelberg solvers for a finite follower universe.

Three routes to the same optimum:

* enumerate every best-response mapping z (one LP per mapping, with the
  inner worst case dualized into the program),
* a single big-M MIP with binary selection variables for the mapping,
* for transport-ball ambiguity, the direct MIP over (x, lambda, w, delta)
  whose size is exactly n + k + 1 continuous and m*k binary variables.

All transport-ball programs share one sign convention: the emitted program
minimizes lambda * radius^t - sum_j nu_j w_j, and the reported leader value
is the negation of that objective.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import solver
from .ambiguity import PolytopeAmbiguity, WassersteinBall, pairwise_distance_pow
from .game import FiniteUniverse, GameInstance, best_response_set
from .solver import (
    INFEASIBLE,
    OPTIMAL,
    LinearProgram,
    MixedIntegerProgram,
    NumericalFailureError,
)

ENUMERATION_GUARD = 100_000
MAPPING_VERIFY_TOL = 1e-5


class EnumerationGuardError(ValueError):
    """m^k exceeds the enumeration guard; use the MIP route instead."""


@dataclass
class BigMConfig:
    """Big-M constant and the epsilon used to close strict inequalities."""

    big_m: float = 2.0
    eps_strict: float = 1e-6

    def __post_init__(self):
        if self.big_m <= 0 or self.eps_strict <= 0:
            raise ValueError("big_m and eps_strict must be positive")


@dataclass
class DrsssSolution:
    """Leader strategy, its worst-case value, and solve diagnostics.

    `mapping[j]` is the follower action induced for the j-th universe
    member. `lam` and `w` are filled on the transport-ball routes and stay
    None otherwise.
    """

    x: np.ndarray
    value: float
    mapping: np.ndarray | None = None
    lam: float | None = None
    w: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "value": float(self.value),
            "mapping": None if self.mapping is None else [int(a) for a in self.mapping],
            "lambda": None if self.lam is None else float(self.lam),
            "w": None if self.w is None else [float(v) for v in self.w],
            "solver_time_s": float(self.diagnostics.get("solver_time_s", 0.0)),
        }


def _finite_utilities(game: GameInstance) -> list[np.ndarray]:
    if not isinstance(game.universe, FiniteUniverse):
        raise ValueError("this solver needs a finite follower universe")
    return game.universe.utilities


def _check_ball_support(game: GameInstance, ball: WassersteinBall) -> list[np.ndarray]:
    utilities = _finite_utilities(game)
    if ball.k != len(utilities):
        raise ValueError("ball nominal support size differs from the universe")
    for u, v in zip(utilities, ball.nominal.support):
        if not np.allclose(u, v, atol=1e-12):
            raise ValueError("ball nominal must be supported on the universe's utilities")
    return utilities


def _add_simplex(prog, x_idx):
    prog.add_row(x_idx, np.ones(x_idx.size), "=", 1.0, name="simplex")


def _mapping_rows(prog, game, utilities, z, x_idx):
    """x must make z[j] a best response under the j-th utility."""
    for j, u in enumerate(utilities):
        diff = u[:, z[j]][:, None] - u          # (n, m) column differences
        for a in range(game.m):
            if a == z[j]:
                continue
            prog.add_row(x_idx, diff[:, a], ">=", 0.0, name=f"br_u{j}_a{a}")


def _verify_mapping(game, utilities, x, mapping, context):
    for j, u in enumerate(utilities):
        if int(mapping[j]) not in best_response_set(game, u, x, tol=MAPPING_VERIFY_TOL):
            raise NumericalFailureError(
                f"{context}: induced action {mapping[j]} is not a best response "
                f"for utility {j}; big-M too small or solver tolerance exceeded")


# -- enumeration over mappings ------------------------------------------------


def _enumeration_guard(m: int, k: int) -> None:
    if m ** k > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"m^k = {m}^{k} exceeds the enumeration guard of {ENUMERATION_GUARD}")


def _polytope_z_lp(game, amb: PolytopeAmbiguity, z) -> LinearProgram:
    # inner min over the polytope dualized: max b'y + z0 with y <= 0 and
    # A'y + z0 <= leader payoff of the induced action, componentwise.
    utilities = game.universe.utilities
    k = len(utilities)
    n_cuts = amb.A.shape[0]
    lp = LinearProgram(sense="max", name=f"enum-z-{''.join(map(str, z))}")
    x = lp.add_vars(game.n, lb=0.0, ub=1.0, prefix="x")
    y = lp.add_vars(n_cuts, lb=-np.inf, ub=0.0, prefix="y")
    z0 = lp.add_var(lb=-np.inf, name="z0")
    if n_cuts:
        lp.set_obj(y, amb.b)
    lp.set_obj(z0, 1.0)
    _add_simplex(lp, x)
    _mapping_rows(lp, game, utilities, z, x)
    for j in range(k):
        idx = np.concatenate([x, y, [z0]]).astype(int)
        coef = np.concatenate([-game.u_l[:, z[j]], amb.A[:, j], [1.0]])
        lp.add_row(idx, coef, "<=", 0.0, name=f"dual_feas_{j}")
    return lp


def _ball_z_lp(game, ball: WassersteinBall, z, cost_pow: np.ndarray) -> LinearProgram:
    # appendix per-mapping LP: min lambda theta^t - nu'w with only the rows
    # the fixed mapping activates (the deactivated big-M rows are vacuous
    # for payoffs in [0, 1] whenever M >= 1)
    utilities = game.universe.utilities
    k = len(utilities)
    lp = LinearProgram(sense="min", name=f"enumlp-z-{''.join(map(str, z))}")
    x = lp.add_vars(game.n, lb=0.0, ub=1.0, prefix="x")
    lam = lp.add_var(lb=0.0, name="lam", obj=ball.radius_pow())
    w = lp.add_vars(k, lb=-np.inf, prefix="w")
    lp.set_obj(w, -ball.nominal.weights)
    _add_simplex(lp, x)
    _mapping_rows(lp, game, utilities, z, x)
    for j in range(k):
        for i in range(k):
            idx = np.concatenate([[w[j], lam], x]).astype(int)
            coef = np.concatenate([[1.0, -cost_pow[i, j]], -game.u_l[:, z[i]]])
            lp.add_row(idx, coef, "<=", 0.0, name=f"w{j}_u{i}")
    return lp


def solve_by_enumeration(game: GameInstance, amb, cfg: BigMConfig | None = None,
                         backend=None) -> DrsssSolution:
    """Try every best-response mapping; keep the best feasible program.

    Infeasible mappings (no leader strategy induces them) are skipped; at
    least one mapping is always feasible because best-response sets are
    non-empty.
    """
    utilities = _finite_utilities(game)
    k, m = len(utilities), game.m
    _enumeration_guard(m, k)
    is_ball = isinstance(amb, WassersteinBall)
    if is_ball:
        _check_ball_support(game, amb)
        cost_pow = pairwise_distance_pow(amb.metric, utilities, amb.nominal.support,
                                         amb.exponent)
    elif not isinstance(amb, PolytopeAmbiguity):
        raise ValueError(f"unsupported ambiguity set {amb!r}")

    best = None
    solved = skipped = 0
    t0 = time.perf_counter()
    for z in itertools.product(range(m), repeat=k):
        lp = _ball_z_lp(game, amb, z, cost_pow) if is_ball else _polytope_z_lp(game, amb, z)
        out = solver.solve_lp(lp, backend=backend)
        if out.status == INFEASIBLE:
            skipped += 1
            continue
        if out.status != OPTIMAL:
            raise NumericalFailureError(f"mapping program ended with status {out.status}")
        solved += 1
        value = -out.objective if is_ball else out.objective
        if best is None or value > best[0] + 1e-12:
            best = (value, out.x, z)
    if best is None:
        raise NumericalFailureError("no feasible best-response mapping found")
    value, point, z = best
    x = point[:game.n]
    lam = float(point[game.n]) if is_ball else None
    w = point[game.n + 1: game.n + 1 + k].copy() if is_ball else None
    mapping = np.array(z, dtype=int)
    _verify_mapping(game, utilities, x, mapping, "enumeration")
    return DrsssSolution(x, float(value), mapping, lam, w, diagnostics={
        "programs_solved": solved,
        "skipped_infeasible": skipped,
        "solver_time_s": time.perf_counter() - t0,
    })


# -- single big-M MIP with mapping selection variables ------------------------


def _selection_rows(prog, game, utilities, x_idx, delta, big_m):
    """Big-M activation: delta[a, j] = 1 forces a to be a best response to u_j."""
    k = len(utilities)
    for j, u in enumerate(utilities):
        for a in range(game.m):
            diff = u[:, a][:, None] - u          # (n, m)
            for a2 in range(game.m):
                idx = np.concatenate([x_idx, [delta[a, j]]]).astype(int)
                coef = np.concatenate([diff[:, a2], [-big_m]])
                prog.add_row(idx, coef, ">=", -big_m, name=f"br_u{j}_{a}_{a2}")
    for j in range(k):
        prog.add_row(delta[:, j], np.ones(game.m), "=", 1.0, name=f"onehot_u{j}")


def solve_by_mip(game: GameInstance, amb, cfg: BigMConfig | None = None,
                 backend=None) -> DrsssSolution:
    """One MIP over (x, q, delta): binaries pick the induced best response.

    q_j is the leader payoff collected under the j-th utility; the ambiguity
    set's inner infimum over expected q is dualized into the objective
    (polytope duality or the transport-ball dual, by variant).
    """
    cfg = cfg or BigMConfig()
    utilities = _finite_utilities(game)
    k, m, n = len(utilities), game.m, game.n
    is_ball = isinstance(amb, WassersteinBall)
    if is_ball:
        _check_ball_support(game, amb)
        cost_pow = pairwise_distance_pow(amb.metric, utilities, amb.nominal.support,
                                         amb.exponent)
    elif not isinstance(amb, PolytopeAmbiguity):
        raise ValueError(f"unsupported ambiguity set {amb!r}")

    prog = MixedIntegerProgram(sense="max", name="drsss-mip")
    x = prog.add_vars(n, lb=0.0, ub=1.0, prefix="x")
    q = prog.add_vars(k, lb=-np.inf, prefix="q")
    if is_ball:
        lam = prog.add_var(lb=0.0, name="lam", obj=-amb.radius_pow())
        w = prog.add_vars(k, lb=-np.inf, prefix="w")
        prog.set_obj(w, amb.nominal.weights)
    else:
        n_cuts = amb.A.shape[0]
        y = prog.add_vars(n_cuts, lb=-np.inf, ub=0.0, prefix="y")
        z0 = prog.add_var(lb=-np.inf, name="z0", obj=1.0)
        if n_cuts:
            prog.set_obj(y, amb.b)
    delta = prog.add_binary_vars(m * k, prefix="d").reshape(m, k)

    _add_simplex(prog, x)
    _selection_rows(prog, game, utilities, x, delta, cfg.big_m)
    # leader-value links: q_j <= u_l(x, a) + M (1 - delta[a, j])
    for j in range(k):
        for a in range(m):
            idx = np.concatenate([[q[j]], x, [delta[a, j]]]).astype(int)
            coef = np.concatenate([[1.0], -game.u_l[:, a], [cfg.big_m]])
            prog.add_row(idx, coef, "<=", cfg.big_m, name=f"qlink_u{j}_a{a}")
    if is_ball:
        # dual of the inner inf over the ball: w_j <= q_i + lam d^t(u_i, u_j)
        for j in range(k):
            for i in range(k):
                prog.add_row([w[j], q[i], lam], [1.0, -1.0, -cost_pow[i, j]],
                             "<=", 0.0, name=f"balldual_{i}_{j}")
    else:
        # dual feasibility of the polytope: A'y + z0 <= q
        for j in range(k):
            idx = np.concatenate([y, [z0], [q[j]]]).astype(int)
            coef = np.concatenate([amb.A[:, j], [1.0], [-1.0]])
            prog.add_row(idx, coef, "<=", 0.0, name=f"dualfeas_{j}")

    out = solver.solve_milp(prog, backend=backend)
    if out.status != OPTIMAL:
        raise NumericalFailureError(f"DRSSS MIP ended with status {out.status}")
    xval = out.x[x]
    mapping = np.array([int(np.argmax(out.x[delta[:, j]])) for j in range(k)])
    _verify_mapping(game, utilities, xval, mapping, "big-M MIP")
    lam_v = float(out.x[lam]) if is_ball else None
    w_v = out.x[w].copy() if is_ball else None
    return DrsssSolution(xval, float(out.objective), mapping, lam_v, w_v,
                         diagnostics={"solver_time_s": out.wall_time_s})


# -- direct transport-ball MIP (finite support) --------------------------------


def build_wasserstein_finite_mip(game: GameInstance, ball: WassersteinBall,
                                 cfg: BigMConfig | None = None):
    """Emit the direct ball MIP; exactly n+k+1 continuous and m*k binary vars."""
    cfg = cfg or BigMConfig()
    utilities = _check_ball_support(game, ball)
    k, m, n = len(utilities), game.m, game.n
    cost_pow = pairwise_distance_pow(ball.metric, utilities, ball.nominal.support,
                                     ball.exponent)
    prog = MixedIntegerProgram(sense="min", name="drsss-ball-mip")
    x = prog.add_vars(n, lb=0.0, ub=1.0, prefix="x")
    lam = prog.add_var(lb=0.0, name="lam", obj=ball.radius_pow())
    w = prog.add_vars(k, lb=-np.inf, prefix="w")
    prog.set_obj(w, -ball.nominal.weights)
    delta = prog.add_binary_vars(m * k, prefix="d").reshape(m, k)
    assert prog.n_vars == n + k + 1 + m * k and int(prog.binary.sum()) == m * k

    _add_simplex(prog, x)
    _selection_rows(prog, game, utilities, x, delta, cfg.big_m)
    # w_j <= (1 - delta[a, i]) M + lam d^t(u_i, u_j) + u_l(x, a)
    for j in range(k):
        for i in range(k):
            for a in range(m):
                idx = np.concatenate([[w[j], lam], x, [delta[a, i]]]).astype(int)
                coef = np.concatenate([[1.0, -cost_pow[i, j]], -game.u_l[:, a],
                                       [cfg.big_m]])
                prog.add_row(idx, coef, "<=", cfg.big_m, name=f"w{j}_u{i}_a{a}")
    meta = {"x": x, "lam": lam, "w": w, "delta": delta,
            "continuous_vars": n + k + 1, "binary_vars": m * k}
    return prog, meta


def solve_wasserstein_finite_mip(game: GameInstance, ball: WassersteinBall,
                                 cfg: BigMConfig | None = None,
                                 backend=None) -> DrsssSolution:
    """Solve the direct ball MIP; leader value is minus the program objective."""
    utilities = _finite_utilities(game)
    prog, meta = build_wasserstein_finite_mip(game, ball, cfg)
    out = solver.solve_milp(prog, backend=backend)
    if out.status != OPTIMAL:
        raise NumericalFailureError(f"ball MIP ended with status {out.status}")
    x = out.x[meta["x"]]
    delta = meta["delta"]
    mapping = np.array([int(np.argmax(out.x[delta[:, j]])) for j in range(len(utilities))])
    _verify_mapping(game, utilities, x, mapping, "ball MIP")
    return DrsssSolution(x, -float(out.objective), mapping,
                         float(out.x[meta["lam"]]), out.x[meta["w"]].copy(),
                         diagnostics={"solver_time_s": out.wall_time_s})
