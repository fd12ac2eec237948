"""HiGHS adapter via scipy.optimize (the default backend).

scipy ships HiGHS for both linprog and milp, so this backend has no
dependencies beyond the library's own. Max-sense programs are negated on the
way in and the objective is restored on the way out.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .model import (
    EQUAL,
    INFEASIBLE,
    LESS,
    LIMIT,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    NumericalFailureError,
    SolveOutcome,
)

_LP_STATUS = {0: OPTIMAL, 1: LIMIT, 2: INFEASIBLE, 3: UNBOUNDED}
_MILP_STATUS = {0: OPTIMAL, 1: LIMIT, 2: INFEASIBLE, 3: UNBOUNDED, 4: LIMIT}


def _split_rows(p: LinearProgram):
    """Assemble sparse A_ub/b_ub and A_eq/b_eq from the row list."""
    n = p.n_vars
    ub_data, ub_i, ub_j, b_ub = [], [], [], []
    eq_data, eq_i, eq_j, b_eq = [], [], [], []
    for row in p.rows:
        if row.relation == EQUAL:
            r = len(b_eq)
            eq_i.extend([r] * row.idx.size)
            eq_j.extend(row.idx.tolist())
            eq_data.extend(row.coef.tolist())
            b_eq.append(row.rhs)
        else:
            sign = 1.0 if row.relation == LESS else -1.0
            r = len(b_ub)
            ub_i.extend([r] * row.idx.size)
            ub_j.extend(row.idx.tolist())
            ub_data.extend((sign * row.coef).tolist())
            b_ub.append(sign * row.rhs)
    A_ub = sp.csr_matrix((ub_data, (ub_i, ub_j)), shape=(len(b_ub), n)) if b_ub else None
    A_eq = sp.csr_matrix((eq_data, (eq_i, eq_j)), shape=(len(b_eq), n)) if b_eq else None
    return A_ub, (np.array(b_ub) if b_ub else None), A_eq, (np.array(b_eq) if b_eq else None)


class ScipyHighsBackend:
    name = "scipy-highs"

    def solve_lp(self, p: LinearProgram, time_limit: float | None = None,
                 options: dict | None = None) -> SolveOutcome:
        A_ub, b_ub, A_eq, b_eq = _split_rows(p)
        c = p.obj if p.sense == "min" else -p.obj
        options = {"presolve": True, **(options or {})}
        if time_limit is not None:
            options["time_limit"] = float(time_limit)
        t0 = time.perf_counter()
        res = linprog(
            c,
            A_ub=A_ub,
            b_ub=b_ub,
            A_eq=A_eq,
            b_eq=b_eq,
            bounds=list(zip(p.lb, p.ub)),
            method="highs",
            options=options,
        )
        wall = time.perf_counter() - t0
        status = _LP_STATUS.get(res.status)
        if status is None:
            raise NumericalFailureError(f"linprog failed: {res.message}")
        if status != OPTIMAL:
            return SolveOutcome(status, wall_time_s=wall, extra={"message": res.message})
        obj = float(res.fun) if p.sense == "min" else -float(res.fun)
        return SolveOutcome(OPTIMAL, np.asarray(res.x, dtype=float), obj + p.constant, wall)

    def solve_milp(self, p: LinearProgram, time_limit: float | None = None) -> SolveOutcome:
        A_ub, b_ub, A_eq, b_eq = _split_rows(p)
        constraints = []
        if A_ub is not None:
            constraints.append(LinearConstraint(A_ub, -np.inf, b_ub))
        if A_eq is not None:
            constraints.append(LinearConstraint(A_eq, b_eq, b_eq))
        c = p.obj if p.sense == "min" else -p.obj
        # HiGHS's default MIP feasibility (1e-6) would let big-M activation
        # rows slip by a whole epsilon gap; tighten well below it
        options = {"mip_feasibility_tolerance": 1e-9,
                   "primal_feasibility_tolerance": 1e-9}
        if time_limit is not None:
            options["time_limit"] = float(time_limit)
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message="Unrecognized options",
                                    category=RuntimeWarning)
            res = milp(
                c,
                constraints=constraints,
                integrality=p.binary.astype(int),
                bounds=Bounds(p.lb, p.ub),
                options=options,
            )
        wall = time.perf_counter() - t0
        status = _MILP_STATUS.get(res.status)
        if status is None:
            raise NumericalFailureError(f"milp failed: {res.message}")
        if res.x is None:
            return SolveOutcome(status if status != OPTIMAL else LIMIT,
                                wall_time_s=wall, extra={"message": res.message})
        obj = float(res.fun) if p.sense == "min" else -float(res.fun)
        return SolveOutcome(status, np.asarray(res.x, dtype=float), obj + p.constant, wall,
                            extra={"mip_gap": getattr(res, "mip_gap", None)})
