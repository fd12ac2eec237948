"""Incremental MIP for transport-ball ambiguity over an infinite universe.

The master MIP carries only a finite set of generated follower payoff
matrices per nominal point. After each master solve, a separation oracle
searches the full universe for the matrix that most violates the semi-
infinite constraint family

    w_j <= lam * d(u, nominal_j)^t + leader payoff under u's best response,

and the violators are folded into the next master. The loop stops once the
most violated margin is within tolerance of zero.

Separation solves one convex subproblem per follower action: minimize the
weighted distance to the nominal point over the payoff matrices that make
that action the strong-tie-break best response. Strict inequalities from
tie-breaking are closed with a small epsilon gap, so the reported subproblem
value is the infimum over the epsilon-restricted region (an overestimate of
the true infimum by a term that vanishes with epsilon).
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import solver
from .ambiguity import WassersteinBall, ground_distance
from .finite import BigMConfig, DrsssSolution, _selection_rows
from .game import (
    BoxUniverse,
    FiniteUniverse,
    GameInstance,
    InspectionFamily,
    strong_tiebreak_payoff,
)
from .solver import (
    INFEASIBLE,
    LIMIT,
    OPTIMAL,
    MixedIntegerProgram,
    NumericalFailureError,
    QuadraticProgram,
)

_LEADER_TIE_TOL = 1e-9


@dataclass
class AlgorithmConfig:
    big_m: float = 2.0
    eps_strict: float = 1e-6
    tol_gamma: float = 1e-6
    max_iter: int = 200
    time_limit: float | None = None
    dedup_tol: float = 1e-8

    def mip_config(self) -> BigMConfig:
        return BigMConfig(self.big_m, self.eps_strict)


@dataclass
class OracleResult:
    """Best subproblem value for one nominal point, with its witness.

    `violator` attains the epsilon-exact infimum and defines the reported
    value. `cut` is the matrix worth adding to the master: a point pushed
    into the interior of the same best-response region, because a boundary
    point can be dodged by an epsilon-sized move of the leader strategy.
    Falls back to the violator itself when the region is too thin.
    """

    gamma: float
    violator: np.ndarray
    action: int
    cut: np.ndarray | None = None

    @property
    def cut_member(self) -> np.ndarray:
        return self.violator if self.cut is None else self.cut


# wider margins tried (in order) when pushing a violator off its region
# boundary; the epsilon-exact point remains the fallback
_CUT_MARGINS = (1e-2, 1e-3, 1e-4)


class SeparationOracle:
    """Finds the universe member most violating the master's w-constraints."""

    #: which follower universes, ground metrics and exponents this oracle handles
    capability: dict = {}

    def supports(self, game: GameInstance, ball: WassersteinBall) -> bool:
        cap = self.capability
        return (isinstance(game.universe, cap.get("universes", ())) and
                ball.metric.kind in cap.get("metrics", ()) and
                float(ball.exponent) in cap.get("exponents", ()))

    def inner_min(self, game, x, lam, nominal_u, eps_strict, backend=None) -> OracleResult:
        raise NotImplementedError


def _better_leader_actions(leader: np.ndarray, a: int) -> np.ndarray:
    """Actions whose leader payoff strictly exceeds action a's."""
    return np.flatnonzero(leader > leader[a] + _LEADER_TIE_TOL)


class BoxFrobeniusOracle(SeparationOracle):
    """Exact separation over the full unit box, Frobenius metric, exponent 2.

    Per candidate action the subproblem is a convex QP in n*m variables:
    the squared distance to the nominal point over the box, subject to the
    best-response rows. `equal_groups` optionally ties sets of (row, col)
    cells to a common value, which restricts the box to a linear family.
    """

    capability = {"universes": (BoxUniverse,), "metrics": ("frobenius",),
                  "exponents": (2.0,)}

    def __init__(self, equal_groups=None):
        self.equal_groups = equal_groups or []

    def _action_qp(self, game, x, lam, uhat, action, margin):
        n, m = game.n, game.m
        leader = x @ game.u_l
        qp = QuadraticProgram(name=f"box-sep-a{action}")
        u = qp.add_vars(n * m, lb=0.0, ub=1.0, prefix="u")
        for idx in range(n * m):
            qp._quad[idx] = lam
            qp._obj[idx] = -2.0 * lam * uhat[idx]
        qp.constant = lam * float(uhat @ uhat) + float(leader[action])
        cells = u.reshape(n, m)
        better = set(_better_leader_actions(leader, action).tolist())
        for a2 in range(m):
            if a2 == action:
                continue
            idx = np.concatenate([cells[:, action], cells[:, a2]])
            coef = np.concatenate([x, -x])
            rhs = margin if a2 in better else 0.0
            qp.add_row(idx, coef, ">=", rhs, name=f"br_{action}_{a2}")
        for group in self.equal_groups:
            flat = [i * m + j for i, j in group]
            for other in flat[1:]:
                qp.add_row([flat[0], other], [1.0, -1.0], "=", 0.0)
        return qp

    def inner_min(self, game, x, lam, nominal_u, eps_strict, backend=None) -> OracleResult:
        n, m = game.n, game.m
        uhat = np.asarray(nominal_u, dtype=float).ravel()
        best = None
        for a in range(m):
            out = solver.solve_qp(self._action_qp(game, x, lam, uhat, a, eps_strict),
                                  backend=backend)
            if out.status == INFEASIBLE:
                continue
            if out.status != OPTIMAL:
                raise NumericalFailureError(f"separation QP status {out.status}")
            if best is None or out.objective < best.gamma - 1e-12:
                best = OracleResult(float(out.objective), out.x.reshape(n, m), a)
        if best is None:
            raise NumericalFailureError("every action's separation subproblem was infeasible")
        for margin in _CUT_MARGINS:
            out = solver.solve_qp(self._action_qp(game, x, lam, uhat, best.action, margin),
                                  backend=backend)
            if out.status == OPTIMAL:
                best.cut = out.x.reshape(n, m)
                break
        return best


class InspectionOracle(SeparationOracle):
    """Two-variable QP separation specialized to the inspection family.

    A family member is determined by its payoff on intersecting cells and
    its payoff elsewhere, so the squared distance to a nominal point
    collapses to c*(hit - hit_nom)^2 + (nm - c)*(miss - miss_nom)^2 with c
    the intersecting-cell count, and every best-response row is linear in
    the same two variables.
    """

    capability = {"universes": (InspectionFamily,), "metrics": ("frobenius",),
                  "exponents": (2.0,)}

    def _action_qp(self, game, x, lam, params, action, margin):
        family: InspectionFamily = game.universe
        c = family.intersect_count
        total = game.n * game.m
        leader = x @ game.u_l
        hit_prob = x @ family.mask.astype(float)   # per follower action
        hit_nom, miss_nom = params
        qp = QuadraticProgram(name=f"insp-sep-a{action}")
        cols = {}
        if c > 0:
            cols["hit"] = qp.add_var(0.0, 1.0, obj=-2.0 * lam * c * hit_nom,
                                     quad=lam * c, name="hit")
        if total - c > 0:
            cols["miss"] = qp.add_var(0.0, 1.0, obj=-2.0 * lam * (total - c) * miss_nom,
                                      quad=lam * (total - c), name="miss")
        qp.constant = (lam * (c * hit_nom ** 2 + (total - c) * miss_nom ** 2)
                       + float(leader[action]))
        better = set(_better_leader_actions(leader, action).tolist())
        for a2 in range(game.m):
            if a2 == action:
                continue
            gap = float(hit_prob[action] - hit_prob[a2])
            idx, coef = [], []
            if "hit" in cols:
                idx.append(cols["hit"])
                coef.append(gap)
            if "miss" in cols:
                idx.append(cols["miss"])
                coef.append(-gap)
            rhs = margin if a2 in better else 0.0
            if not idx:
                if rhs > 0:
                    return None, None   # zero row can never meet a strict gap
                continue
            qp.add_row(idx, coef, ">=", rhs, name=f"br_{action}_{a2}")
        return qp, cols

    def _solve_action(self, game, x, lam, params, action, margin, backend):
        qp, cols = self._action_qp(game, x, lam, params, action, margin)
        if qp is None:
            return None
        out = solver.solve_qp(qp, backend=backend)
        if out.status == INFEASIBLE:
            return None
        if out.status != OPTIMAL:
            raise NumericalFailureError(f"separation QP status {out.status}")
        hit = float(out.x[cols["hit"]]) if "hit" in cols else params[0]
        miss = float(out.x[cols["miss"]]) if "miss" in cols else params[1]
        return float(out.objective), hit, miss

    def inner_min(self, game, x, lam, nominal_u, eps_strict, backend=None) -> OracleResult:
        family: InspectionFamily = game.universe
        params = _family_params(family, np.asarray(nominal_u, dtype=float))
        best = None
        for a in range(game.m):
            solved = self._solve_action(game, x, lam, params, a, eps_strict, backend)
            if solved is None:
                continue
            value, hit, miss = solved
            if best is None or value < best.gamma - 1e-12:
                best = OracleResult(value, family.member(hit, miss), a)
        if best is None:
            raise NumericalFailureError("every action's separation subproblem was infeasible")
        for margin in _CUT_MARGINS:
            solved = self._solve_action(game, x, lam, params, best.action, margin, backend)
            if solved is not None:
                best.cut = family.member(solved[1], solved[2])
                break
        return best


class FiniteSetOracle(SeparationOracle):
    """Exact separation over a finite universe by direct enumeration.

    No epsilon gap is needed: each candidate matrix is evaluated with the
    strong-tie-break payoff directly, which partitions the universe exactly.
    """

    capability = {"universes": (FiniteUniverse,), "metrics": ("frobenius",),
                  "exponents": ()}

    def __init__(self, metric=None, exponent: float = 2.0):
        from .ambiguity import FrobeniusMetric
        self.metric = metric or FrobeniusMetric()
        self.exponent = float(exponent)

    def supports(self, game, ball) -> bool:
        return isinstance(game.universe, FiniteUniverse) and ball.exponent >= 1

    def inner_min(self, game, x, lam, nominal_u, eps_strict, backend=None) -> OracleResult:
        best = None
        for u in game.universe.utilities:
            payoff, action = strong_tiebreak_payoff(game, u, x)
            value = lam * ground_distance(self.metric, u, nominal_u) ** self.exponent + payoff
            if best is None or value < best.gamma - 1e-15:
                best = OracleResult(float(value), u, action)
        return best


def _family_params(family: InspectionFamily, u: np.ndarray) -> tuple[float, float]:
    """Recover (hit, miss) payoffs of a family member matrix."""
    hit = float(u[family.mask][0]) if family.mask.any() else 0.0
    miss = float(u[~family.mask][0]) if (~family.mask).any() else 0.0
    return hit, miss


def default_oracle(game: GameInstance, ball: WassersteinBall | None = None) -> SeparationOracle:
    """Pick the concrete oracle matching the game's follower universe."""
    if isinstance(game.universe, BoxUniverse):
        return BoxFrobeniusOracle()
    if isinstance(game.universe, InspectionFamily):
        return InspectionOracle()
    if isinstance(game.universe, FiniteUniverse):
        if ball is not None:
            return FiniteSetOracle(ball.metric, ball.exponent)
        return FiniteSetOracle()
    raise ValueError(f"no oracle available for universe {game.universe!r}")


# -- master problem state ------------------------------------------------------


@dataclass
class MasterState:
    """Generated payoff matrices and the latest master solution.

    `pool` is the union of all generated matrices; `per_point[j]` indexes the
    matrices attached to nominal point j (always containing j's own nominal
    matrix, which seeds the pool). `dist_pow[(idx, j)]` caches
    d(pool[idx], nominal_j)^t for every attached pair.
    """

    pool: list[np.ndarray]
    per_point: list[list[int]]
    dist_pow: dict
    x: np.ndarray | None = None
    lam: float | None = None
    w: np.ndarray | None = None
    chosen: np.ndarray | None = None
    iteration: int = 0
    history: list = field(default_factory=list)

    @staticmethod
    def initial(game: GameInstance, ball: WassersteinBall) -> "MasterState":
        pool = [np.array(u, dtype=float) for u in ball.nominal.support]
        per_point = [[j] for j in range(ball.k)]
        dist_pow = {(j, j): 0.0 for j in range(ball.k)}
        return MasterState(pool, per_point, dist_pow)

    @property
    def pool_size(self) -> int:
        return len(self.pool)

    def add_violator(self, j: int, u: np.ndarray, ball: WassersteinBall,
                     dedup_tol: float) -> bool:
        """Attach u to nominal point j unless an equal matrix already is."""
        idx = None
        for i, member in enumerate(self.pool):
            if ground_distance(ball.metric, member, u) <= dedup_tol:
                idx = i
                break
        if idx is None:
            self.pool.append(np.array(u, dtype=float))
            idx = len(self.pool) - 1
        if idx in self.per_point[j]:
            return False
        self.per_point[j].append(idx)
        self.dist_pow[(idx, j)] = ground_distance(
            ball.metric, self.pool[idx], ball.nominal.support[j]) ** ball.exponent
        return True


def build_master_mip(state: MasterState, game: GameInstance, ball: WassersteinBall,
                     cfg: AlgorithmConfig | None = None):
    """Master MIP over the generated pool.

    Variables: x (simplex), lam >= 0, w per nominal point, one binary per
    (action, pool member). Row counts are m^2 * |pool| best-response rows,
    m * sum_j |per_point[j]| value rows, |pool| one-hot rows and the simplex
    row; the meta dict reports them for assertion.
    """
    cfg = cfg or AlgorithmConfig()
    n, m, k = game.n, game.m, ball.k
    pool = state.pool
    prog = MixedIntegerProgram(sense="min", name=f"master-t{state.iteration + 1}")
    x = prog.add_vars(n, lb=0.0, ub=1.0, prefix="x")
    lam = prog.add_var(lb=0.0, name="lam", obj=ball.radius_pow())
    w = prog.add_vars(k, lb=-np.inf, prefix="w")
    prog.set_obj(w, -ball.nominal.weights)
    delta = prog.add_binary_vars(m * len(pool), prefix="d").reshape(m, len(pool))

    prog.add_row(x, np.ones(n), "=", 1.0, name="simplex")
    _selection_rows(prog, game, pool, x, delta, cfg.big_m)
    value_rows = 0
    for j in range(k):
        for idx in state.per_point[j]:
            dpow = state.dist_pow[(idx, j)]
            for a in range(m):
                row_idx = np.concatenate([[w[j], lam], x, [delta[a, idx]]]).astype(int)
                coef = np.concatenate([[1.0, -dpow], -game.u_l[:, a], [cfg.big_m]])
                prog.add_row(row_idx, coef, "<=", cfg.big_m, name=f"w{j}_p{idx}_a{a}")
                value_rows += 1
    meta = {
        "x": x, "lam": lam, "w": w, "delta": delta,
        "br_rows": m * m * len(pool),
        "value_rows": value_rows,
        "onehot_rows": len(pool),
    }
    return prog, meta


def separate(oracle: SeparationOracle, state: MasterState, game: GameInstance,
             ball: WassersteinBall, j: int, cfg: AlgorithmConfig | None = None,
             backend=None) -> OracleResult:
    """Solve the separation subproblem for nominal point j at the current master point."""
    cfg = cfg or AlgorithmConfig()
    if state.x is None or state.lam is None:
        raise ValueError("separate() needs a solved master state")
    return oracle.inner_min(game, state.x, state.lam, ball.nominal.support[j],
                            cfg.eps_strict, backend=backend)


def run_algorithm1(game: GameInstance, ball: WassersteinBall,
                   oracle: SeparationOracle | None = None,
                   cfg: AlgorithmConfig | None = None,
                   backend=None) -> DrsssSolution:
    """Alternate master solves and separation until no violated matrix remains.

    Terminates when the most violated margin
    min_j (subproblem value_j - w_j) is >= -tol_gamma. On iteration or time
    budget exhaustion the best-so-far master solution is returned with
    diagnostics["converged"] = False rather than raising.
    """
    cfg = cfg or AlgorithmConfig()
    oracle = oracle or default_oracle(game, ball)
    if not oracle.supports(game, ball):
        raise ValueError(f"{type(oracle).__name__} does not support this game/ball")

    state = MasterState.initial(game, ball)
    t_start = time.perf_counter()
    status = "unconverged"
    master_obj = None
    for tau in range(1, cfg.max_iter + 1):
        t_iter = time.perf_counter()
        remaining = None
        if cfg.time_limit is not None:
            remaining = cfg.time_limit - (time.perf_counter() - t_start)
            if remaining <= 0:
                status = "timeout"
                break
        prog, meta = build_master_mip(state, game, ball, cfg)
        out = solver.solve_milp(prog, backend=backend, time_limit=remaining)
        if out.status == LIMIT:
            status = "timeout"
            if out.x is None:
                break
        elif out.status != OPTIMAL:
            raise NumericalFailureError(f"master MIP ended with status {out.status}")
        master_obj = float(out.objective)
        state.x = out.x[meta["x"]]
        state.lam = float(out.x[meta["lam"]])
        state.w = out.x[meta["w"]].copy()
        state.chosen = np.array([int(np.argmax(out.x[meta["delta"][:, p]]))
                                 for p in range(state.pool_size)])
        state.iteration = tau

        results = [separate(oracle, state, game, ball, j, cfg, backend)
                   for j in range(ball.k)]
        margins = np.array([res.gamma - state.w[j] for j, res in enumerate(results)])
        gamma = float(margins.min())
        state.history.append({
            "tau": tau,
            "master_objective": master_obj,
            "lambda": state.lam,
            "E_size": state.pool_size,
            "Gamma": gamma,
            "wall_time_s": time.perf_counter() - t_iter,
        })
        if status == "timeout":
            break
        if gamma >= -cfg.tol_gamma:
            status = "ok"
            break
        added_any = False
        for j, res in enumerate(results):
            if margins[j] < -cfg.tol_gamma:
                added = state.add_violator(j, res.cut_member, ball, cfg.dedup_tol)
                if not added:
                    # interior cut already known: the exact violator still
                    # certifies a violation, so pin it directly
                    added = state.add_violator(j, res.violator, ball, cfg.dedup_tol)
                added_any |= added
        if not added_any:
            # solver noise reproposed known matrices; growing further is pointless
            status = "stalled"
            break
    if state.x is None:
        raise NumericalFailureError("master MIP produced no solution within the budget")

    mapping = state.chosen[:ball.k].copy() if state.chosen is not None else None
    return DrsssSolution(
        state.x, -master_obj, mapping, state.lam, state.w,
        diagnostics={
            "status": status,
            "converged": status == "ok",
            "iterations": list(state.history),
            "n_iterations": state.iteration,
            "pool_size": state.pool_size,
            "solver_time_s": time.perf_counter() - t_start,
        })


# -- diagnostics ---------------------------------------------------------------


def sample_universe(game: GameInstance, rng: np.random.Generator) -> np.ndarray:
    """One uniformly random member of the game's follower universe."""
    uni = game.universe
    if isinstance(uni, BoxUniverse):
        return rng.uniform(size=(game.n, game.m))
    if isinstance(uni, InspectionFamily):
        return uni.member(rng.uniform(), rng.uniform())
    return uni.utilities[int(rng.integers(len(uni.utilities)))]


def termination_certificate(game: GameInstance, ball: WassersteinBall,
                            solution: DrsssSolution, n_probes: int = 50,
                            rng: np.random.Generator | None = None) -> float:
    """Sampled validity of the semi-infinite constraints at the returned point.

    Returns the smallest margin lam * d(probe, nominal_j)^t + h(x, probe) - w_j
    over `n_probes` random universe members per nominal point; a correct
    termination keeps it above a small negative tolerance.
    """
    rng = rng or np.random.default_rng(0)
    worst = np.inf
    for j in range(ball.k):
        for _ in range(n_probes):
            probe = sample_universe(game, rng)
            payoff, _ = strong_tiebreak_payoff(game, probe, solution.x)
            value = (solution.lam *
                     ground_distance(ball.metric, probe, ball.nominal.support[j])
                     ** ball.exponent + payoff)
            worst = min(worst, value - solution.w[j])
    return float(worst)


def dump_iteration_log(solution: DrsssSolution, path) -> None:
    """Write the per-iteration log as CSV: tau, objective, lambda, pool, margin, time."""
    fields = ["tau", "master_objective", "lambda", "E_size", "Gamma", "wall_time_s"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for entry in solution.diagnostics.get("iterations", []):
            writer.writerow({f: entry[f] for f in fields})
