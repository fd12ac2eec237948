"""Pure-numpy fallback backend: dense two-phase simplex plus branch and bound.

Exists so the test suite and small solves run in environments where no native
solver is importable. It is deliberately simple (Bland's rule, dense
tableaus, DFS branch and bound on binaries) and is only meant for the desk
scale programs this library emits in tests.
"""

from __future__ import annotations

import time

import numpy as np

from .model import (
    EQUAL,
    GREATER,
    INFEASIBLE,
    LESS,
    LIMIT,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    NumericalFailureError,
    SolveOutcome,
)

_PIVOT_TOL = 1e-9
_FEAS_EPS = 1e-8
_MAX_PIVOTS = 50_000


class _Standardized:
    """min c's, A s = b, s >= 0, with a map back to the original variables."""

    def __init__(self, p: LinearProgram):
        n = p.n_vars
        lb, ub = p.lb, p.ub
        cols = []          # per original var: list of (std_col, sign)
        shift = np.zeros(n)
        mirror = np.zeros(n, dtype=bool)
        n_std = 0
        extra_upper = []   # (std_col, cap) rows to add
        for j in range(n):
            if np.isfinite(lb[j]):
                shift[j] = lb[j]
                cols.append([(n_std, 1.0)])
                if np.isfinite(ub[j]):
                    extra_upper.append((n_std, ub[j] - lb[j]))
                n_std += 1
            elif np.isfinite(ub[j]):
                # x = ub - s
                shift[j] = ub[j]
                mirror[j] = True
                cols.append([(n_std, -1.0)])
                n_std += 1
            else:
                cols.append([(n_std, 1.0), (n_std + 1, -1.0)])
                n_std += 2

        rows_A, rows_b, rows_rel = [], [], []
        for row in p.rows:
            a = np.zeros(n_std)
            rhs = row.rhs
            for j, coef in zip(row.idx, row.coef):
                rhs -= coef * shift[j]
                for col, sign in cols[j]:
                    a[col] += coef * sign
            rows_A.append(a)
            rows_b.append(rhs)
            rows_rel.append(row.relation)
        for col, cap in extra_upper:
            a = np.zeros(n_std)
            a[col] = 1.0
            rows_A.append(a)
            rows_b.append(cap)
            rows_rel.append(LESS)

        # slack / surplus columns
        n_slack = sum(1 for r in rows_rel if r != EQUAL)
        m = len(rows_A)
        A = np.zeros((m, n_std + n_slack))
        if m:
            A[:, :n_std] = np.array(rows_A)
        b = np.array(rows_b, dtype=float)
        s = n_std
        for i, rel in enumerate(rows_rel):
            if rel == LESS:
                A[i, s] = 1.0
                s += 1
            elif rel == GREATER:
                A[i, s] = -1.0
                s += 1
        neg = b < 0
        A[neg] *= -1.0
        b[neg] *= -1.0

        c = np.zeros(n_std + n_slack)
        p_obj = p.obj if p.sense == "min" else -p.obj
        obj_shift = float(np.dot(p_obj, shift))
        for j in range(n):
            for col, sign in cols[j]:
                c[col] += p_obj[j] * sign

        self.A, self.b, self.c = A, b, c
        self.cols, self.shift = cols, shift
        self.obj_shift = obj_shift
        self.n_orig = n

    def back(self, s: np.ndarray) -> np.ndarray:
        x = self.shift.copy()
        for j in range(self.n_orig):
            for col, sign in self.cols[j]:
                x[j] += sign * s[col]
        return x


def _simplex(A, b, c):
    """Two-phase tableau simplex with Bland's rule.

    Returns (status, x, objective) on the standard-form problem.
    """
    m, n = A.shape
    # phase 1: artificial basis
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))
    # phase-1 cost row: minimize sum of artificials (reduced form)
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()

    def pivot(T, basis, allowed):
        pivots = 0
        while True:
            cost = T[-1, :-1]
            enter = -1
            for j in allowed:
                if cost[j] < -_PIVOT_TOL:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            col = T[:m, enter]
            best, leave = np.inf, -1
            for i in range(m):
                if col[i] > _PIVOT_TOL:
                    ratio = T[i, -1] / col[i]
                    if ratio < best - 1e-12 or (abs(ratio - best) <= 1e-12 and
                                                (leave < 0 or basis[i] < basis[leave])):
                        best, leave = ratio, i
            if leave < 0:
                return UNBOUNDED
            piv = T[leave, enter]
            T[leave] /= piv
            for i in range(m + 1):
                if i != leave and abs(T[i, enter]) > 1e-13:
                    T[i] -= T[i, enter] * T[leave]
            basis[leave] = enter
            pivots += 1
            if pivots > _MAX_PIVOTS:
                raise NumericalFailureError("simplex pivot limit exceeded")

    status = pivot(T, basis, list(range(n)))
    if status != OPTIMAL or T[m, -1] < -1e-7:
        return INFEASIBLE, None, None

    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if abs(T[i, j]) > _PIVOT_TOL:
                    piv = T[i, j]
                    T[i] /= piv
                    for r in range(m + 1):
                        if r != i and abs(T[r, j]) > 1e-13:
                            T[r] -= T[r, j] * T[i]
                    basis[i] = j
                    break

    # phase 2 cost row
    T[m, :] = 0.0
    T[m, :n] = c
    for i in range(m):
        if basis[i] < n and abs(c[basis[i]]) > 0:
            T[m] -= c[basis[i]] * T[i]
    status = pivot(T, basis, list(range(n)))
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    return OPTIMAL, x, float(np.dot(c, x))


class ReferenceBackend:
    name = "reference-simplex"

    def solve_lp(self, p: LinearProgram, time_limit: float | None = None) -> SolveOutcome:
        t0 = time.perf_counter()
        std = _Standardized(p)
        status, s, obj = _simplex(std.A, std.b, std.c)
        wall = time.perf_counter() - t0
        if status != OPTIMAL:
            return SolveOutcome(status, wall_time_s=wall)
        x = std.back(s)
        value = obj + std.obj_shift
        if p.sense == "max":
            value = -value
        return SolveOutcome(OPTIMAL, x, value + p.constant, wall)

    def solve_milp(self, p: LinearProgram, time_limit: float | None = None) -> SolveOutcome:
        t0 = time.perf_counter()
        bin_idx = np.flatnonzero(p.binary)
        sense_mul = 1.0 if p.sense == "min" else -1.0

        best_x, best_obj = None, np.inf   # minimization of sense_mul * objective
        # each node fixes a subset of binaries via (var, value) pairs
        stack: list[dict] = [{}]
        nodes = 0
        while stack:
            nodes += 1
            if nodes > 20_000:
                break
            if time_limit is not None and time.perf_counter() - t0 > time_limit:
                break
            fixing = stack.pop()
            relax = _copy_with_fixings(p, fixing)
            out = self.solve_lp(relax)
            if out.status != OPTIMAL:
                continue
            node_obj = sense_mul * (out.objective - p.constant)
            if node_obj >= best_obj - 1e-9:
                continue
            frac = np.abs(out.x[bin_idx] - np.round(out.x[bin_idx]))
            worst = int(np.argmax(frac)) if frac.size else 0
            if not frac.size or frac[worst] <= 1e-7:
                best_obj = node_obj
                best_x = out.x.copy()
                if bin_idx.size:
                    best_x[bin_idx] = np.round(best_x[bin_idx])
                continue
            var = int(bin_idx[worst])
            for val in (1.0, 0.0):
                child = dict(fixing)
                child[var] = val
                stack.append(child)
        wall = time.perf_counter() - t0
        if best_x is None:
            if nodes > 20_000 or (time_limit is not None and wall > time_limit):
                return SolveOutcome(LIMIT, wall_time_s=wall)
            return SolveOutcome(INFEASIBLE, wall_time_s=wall)
        status = OPTIMAL
        if nodes > 20_000 or (time_limit is not None and wall > time_limit):
            status = LIMIT
        return SolveOutcome(status, best_x, sense_mul * best_obj + p.constant, wall)


def _copy_with_fixings(p: LinearProgram, fixing: dict[int, float]) -> LinearProgram:
    q = LinearProgram(sense=p.sense, name=p.name)
    q.constant = p.constant
    lb, ub = p.lb, p.ub
    for j in range(p.n_vars):
        lo, hi = lb[j], ub[j]
        if j in fixing:
            lo = hi = fixing[j]
        q.add_var(lo, hi, p._obj[j], p._var_names[j])
    q.rows = p.rows
    return q
