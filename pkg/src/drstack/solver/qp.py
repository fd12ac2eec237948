"""Primal active-set method for strictly convex diagonal QPs.

Handles the quadratic programs this library emits: separation subproblems
that are either Euclidean-projection-like (all curvatures positive) or, when
the dual weight in front of the distance term is zero, plain feasibility
problems that get dispatched to the LP backend.
"""

from __future__ import annotations

import time

import numpy as np

from .model import (
    EQUAL,
    GREATER,
    INFEASIBLE,
    KKT_TOL,
    LESS,
    OPTIMAL,
    LinearProgram,
    NumericalFailureError,
    QuadraticProgram,
    SolveOutcome,
    objective_value,
)

_ZERO_CURVATURE = 1e-13
_MAX_ITER = 1000


def _collect_constraints(p: QuadraticProgram):
    """Normalize rows and finite bounds into equalities and a'x <= b rows."""
    n = p.n_vars
    eqs, ineqs = [], []
    for row in p.rows:
        a = np.zeros(n)
        a[row.idx] = row.coef
        if row.relation == EQUAL:
            eqs.append((a, row.rhs))
        elif row.relation == LESS:
            ineqs.append((a, row.rhs))
        else:
            ineqs.append((-a, -row.rhs))
    lb, ub = p.lb, p.ub
    for j in range(n):
        if np.isfinite(lb[j]):
            a = np.zeros(n)
            a[j] = -1.0
            ineqs.append((a, -lb[j]))
        if np.isfinite(ub[j]):
            a = np.zeros(n)
            a[j] = 1.0
            ineqs.append((a, ub[j]))
    return eqs, ineqs


def _independent_subset(rows: list[np.ndarray]) -> list[int]:
    """Indices of a maximal linearly independent subset, earlier rows first."""
    basis: list[np.ndarray] = []
    keep: list[int] = []
    for i, a in enumerate(rows):
        v = np.asarray(a, dtype=float).copy()
        for u in basis:
            v -= (v @ u) * u
        norm = np.linalg.norm(v)
        if norm > 1e-9 * max(1.0, float(np.linalg.norm(a))):
            basis.append(v / norm)
            keep.append(i)
    return keep


# regions are declared empty when the least-total-violation point still
# misses the rows by more than solver noise; epsilon-gap rows that contradict
# each other land well above this, genuinely feasible systems well below
_PHASE1_INFEAS = 1e-8


def _feasible_start(p: QuadraticProgram, backend, time_limit):
    """Elastic phase 1: minimize total row violation to get a start point.

    A plain feasibility LP cannot distinguish an empty region from one that
    is merely thinner than the LP tolerance; the elastic objective can.
    """
    lp = LinearProgram(sense="min", name=p.name + ":phase1")
    for j in range(p.n_vars):
        lp.add_var(p._lb[j], p._ub[j], 0.0, p._var_names[j])
    for r, row in enumerate(p.rows):
        # rows are normalized so the violation measure is geometric, not
        # scaled by however small the row coefficients happen to be
        scale = float(np.max(np.abs(row.coef), initial=0.0))
        if scale == 0.0:
            continue   # vacuous or plainly contradictory rows are the caller's job
        coef, rhs = row.coef / scale, row.rhs / scale
        if row.relation == GREATER:
            s = lp.add_var(0.0, np.inf, 1.0, f"viol{r}")
            lp.add_row(np.append(row.idx, s), np.append(coef, 1.0),
                       GREATER, rhs)
        elif row.relation == LESS:
            s = lp.add_var(0.0, np.inf, 1.0, f"viol{r}")
            lp.add_row(np.append(row.idx, s), np.append(coef, -1.0),
                       LESS, rhs)
        else:
            sp = lp.add_var(0.0, np.inf, 1.0, f"violp{r}")
            sm = lp.add_var(0.0, np.inf, 1.0, f"violm{r}")
            lp.add_row(np.append(row.idx, [sp, sm]),
                       np.append(coef, [1.0, -1.0]), EQUAL, rhs)
    try:
        # the elastic objective must resolve violations an order below the
        # epsilon gap, finer than default LP tolerances
        out = backend.solve_lp(lp, time_limit=time_limit,
                               options={"primal_feasibility_tolerance": 1e-10,
                                        "dual_feasibility_tolerance": 1e-10})
    except TypeError:
        out = backend.solve_lp(lp, time_limit=time_limit)
    if out.status != OPTIMAL:
        return out
    point = out.x[:p.n_vars]
    residual = max(float(out.objective), _total_violation(p, point))
    if residual > _PHASE1_INFEAS:
        return SolveOutcome(INFEASIBLE, wall_time_s=out.wall_time_s,
                            extra={"min_violation": residual})
    return SolveOutcome(OPTIMAL, point, 0.0, out.wall_time_s)


def _total_violation(p: QuadraticProgram, x: np.ndarray) -> float:
    """Sum of row violations with each row normalized to unit max coefficient."""
    total = 0.0
    for row in p.rows:
        scale = float(np.max(np.abs(row.coef), initial=0.0))
        if scale == 0.0:
            continue
        act = float(row.coef @ x[row.idx]) / scale
        rhs = row.rhs / scale
        if row.relation == GREATER:
            total += max(0.0, rhs - act)
        elif row.relation == LESS:
            total += max(0.0, act - rhs)
        else:
            total += abs(act - rhs)
    return total


def _kkt_residual(p, x, eqs, ineqs, mult_eq, mult_in):
    g = 2.0 * p.quad * x + p.obj
    for (a, _), mu in zip(eqs, mult_eq):
        g = g + mu * a
    viol = 0.0
    for (a, b), mu in zip(ineqs, mult_in):
        g = g + mu * a
        slack = b - float(a @ x)
        viol = max(viol, -slack)                      # primal feasibility
        viol = max(viol, -mu)                         # dual feasibility
        viol = max(viol, abs(mu * slack))             # complementarity
    for a, b in eqs:
        viol = max(viol, abs(float(a @ x) - b))
    return max(viol, float(np.max(np.abs(g), initial=0.0)))


def solve_qp_active_set(p: QuadraticProgram, backend, time_limit: float | None = None) -> SolveOutcome:
    p.validate()
    quad = p.quad
    t0 = time.perf_counter()

    if quad.size == 0 or float(quad.max(initial=0.0)) <= _ZERO_CURVATURE:
        # no curvature anywhere: it is an LP
        lp = LinearProgram(sense="min", name=p.name)
        lp.constant = p.constant
        for j in range(p.n_vars):
            lp.add_var(p._lb[j], p._ub[j], p._obj[j], p._var_names[j])
        lp.rows = p.rows
        return backend.solve_lp(lp, time_limit=time_limit)

    if float(quad.min()) <= _ZERO_CURVATURE:
        raise NumericalFailureError(
            "mixed zero/positive curvature QP is not supported; emit the "
            "flat directions as fixed variables instead")

    start = _feasible_start(p, backend, time_limit)
    if start.status != OPTIMAL:
        return SolveOutcome(start.status, wall_time_s=time.perf_counter() - t0)

    eqs, ineqs = _collect_constraints(p)
    n = p.n_vars
    x = np.asarray(start.x, dtype=float).copy()
    Q = 2.0 * quad
    working: list[int] = []     # indices into ineqs

    for _ in range(_MAX_ITER):
        g = Q * x + p.obj
        act_rows = [a for a, _ in eqs] + [ineqs[i][0] for i in working]
        # dependent active rows (tied cells at a shared bound, say) would make
        # the KKT matrix singular; keep a maximal independent subset, dropped
        # rows implicitly carry multiplier zero
        keep = _independent_subset(act_rows)
        na = len(keep)
        if na:
            A = np.array([act_rows[i] for i in keep])
            K = np.zeros((n + na, n + na))
            K[:n, :n] = np.diag(Q)
            K[:n, n:] = A.T
            K[n:, :n] = A
            rhs = np.concatenate([-g, np.zeros(na)])
            sol = np.linalg.solve(K, rhs)
            step = sol[:n]
            mult_kept = sol[n:]
        else:
            step = -g / Q
            mult_kept = np.zeros(0)
        mult = np.zeros(len(act_rows))
        mult[keep] = mult_kept

        if float(np.max(np.abs(step), initial=0.0)) <= 1e-11:
            mult_in = mult[len(eqs):]
            if mult_in.size == 0 or float(mult_in.min(initial=0.0)) >= -1e-9:
                mult_full = np.zeros(len(ineqs))
                for i, w in zip(working, mult_in):
                    mult_full[i] = max(w, 0.0)
                resid = _kkt_residual(p, x, eqs, ineqs, mult[:len(eqs)], mult_full)
                if resid > KKT_TOL:
                    raise NumericalFailureError(f"QP KKT residual {resid:.2e} above tolerance")
                return SolveOutcome(OPTIMAL, x, objective_value(p, x),
                                    time.perf_counter() - t0,
                                    extra={"kkt_residual": resid})
            drop = int(np.argmin(mult_in))
            working.pop(drop)
            continue

        # ratio test against non-working inequalities
        alpha, block = 1.0, -1
        for i, (a, b) in enumerate(ineqs):
            if i in working:
                continue
            adir = float(a @ step)
            if adir > 1e-12:
                room = (b - float(a @ x)) / adir
                if room < alpha - 1e-12:
                    alpha, block = max(room, 0.0), i
        x = x + alpha * step
        if block >= 0:
            working.append(block)

    raise NumericalFailureError("active-set QP iteration limit exceeded")
