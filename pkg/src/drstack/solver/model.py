"""Mathematical program containers shared by every solve routine.

Three program classes cover everything the library emits: linear programs,
mixed-integer programs whose integer variables are all binary, and convex
quadratic programs with a diagonal quadratic term.  Programs are built
incrementally (add variables, then rows) and handed to a backend; they carry
no solver state themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Outcome statuses
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
LIMIT = "limit-hit"

# Feasibility / optimality tolerances, fixed for the whole library.
FEAS_TOL = 1e-7          # LP / MILP primal feasibility
INTEGRALITY_TOL = 1e-6   # binary variables at an optimum
KKT_TOL = 1e-6           # QP stationarity residual

LESS, EQUAL, GREATER = "<=", "=", ">="
_RELATIONS = (LESS, EQUAL, GREATER)


class SolverError(Exception):
    """Base class for solve-time failures."""


class BackendUnavailableError(SolverError):
    pass


class NumericalFailureError(SolverError):
    """A backend returned something that fails post-solve verification."""


class NonConvexError(SolverError):
    """Quadratic objective with a negative curvature entry."""


class ModelError(ValueError):
    """Program violates a structural invariant (bad bounds, bad indices...)."""


@dataclass
class Row:
    idx: np.ndarray
    coef: np.ndarray
    relation: str
    rhs: float
    name: str = ""


class LinearProgram:
    """min or max of c'x + constant subject to linear rows and variable bounds."""

    is_integer = False
    is_quadratic = False

    def __init__(self, sense: str = "min", name: str = ""):
        if sense not in ("min", "max"):
            raise ModelError(f"sense must be 'min' or 'max', got {sense!r}")
        self.sense = sense
        self.name = name
        self.constant = 0.0
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._obj: list[float] = []
        self._binary: list[bool] = []
        self._var_names: list[str] = []
        self.rows: list[Row] = []

    # -- variables ---------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self._lb)

    def add_var(self, lb=0.0, ub=np.inf, obj=0.0, name="") -> int:
        if lb > ub:
            raise ModelError(f"variable bounds reversed: [{lb}, {ub}]")
        self._lb.append(float(lb))
        self._ub.append(float(ub))
        self._obj.append(float(obj))
        self._binary.append(False)
        self._var_names.append(name or f"x{len(self._lb) - 1}")
        return len(self._lb) - 1

    def add_vars(self, count, lb=0.0, ub=np.inf, obj=0.0, prefix="x") -> np.ndarray:
        start = self.n_vars
        for i in range(count):
            self.add_var(lb, ub, obj, name=f"{prefix}{start + i}")
        return np.arange(start, start + count)

    def set_obj(self, idx, coef) -> None:
        for i, c in zip(np.atleast_1d(idx), np.atleast_1d(coef)):
            self._obj[int(i)] = float(c)

    @property
    def lb(self) -> np.ndarray:
        return np.array(self._lb)

    @property
    def ub(self) -> np.ndarray:
        return np.array(self._ub)

    @property
    def obj(self) -> np.ndarray:
        return np.array(self._obj)

    @property
    def binary(self) -> np.ndarray:
        return np.array(self._binary)

    @property
    def var_names(self) -> list[str]:
        return list(self._var_names)

    # -- rows ---------------------------------------------------------------

    def add_row(self, idx, coef, relation: str, rhs: float, name: str = "") -> None:
        if relation not in _RELATIONS:
            raise ModelError(f"unknown relation {relation!r}")
        idx = np.asarray(idx, dtype=int).ravel()
        coef = np.asarray(coef, dtype=float).ravel()
        if idx.shape != coef.shape:
            raise ModelError("row index/coefficient length mismatch")
        self.rows.append(Row(idx, coef, relation, float(rhs), name))

    def validate(self) -> None:
        n = self.n_vars
        for j in range(n):
            if self._lb[j] > self._ub[j]:
                raise ModelError(f"bounds reversed on variable {j}")
        for r, row in enumerate(self.rows):
            if row.idx.size and (row.idx.min() < 0 or row.idx.max() >= n):
                raise ModelError(f"row {r} references an undeclared variable")
        for j, isbin in enumerate(self._binary):
            if isbin and not (self._lb[j] >= 0.0 and self._ub[j] <= 1.0):
                raise ModelError(f"binary variable {j} has bounds outside [0, 1]")


class MixedIntegerProgram(LinearProgram):
    """LinearProgram plus a set of variables restricted to {0, 1}."""

    is_integer = True

    def add_binary_var(self, obj=0.0, name="") -> int:
        j = self.add_var(0.0, 1.0, obj, name)
        self._binary[j] = True
        return j

    def add_binary_vars(self, count, obj=0.0, prefix="d") -> np.ndarray:
        start = self.n_vars
        for i in range(count):
            self.add_binary_var(obj, name=f"{prefix}{start + i}")
        return np.arange(start, start + count)


class QuadraticProgram(LinearProgram):
    """min of sum_i quad_i x_i^2 + c'x + constant over linear rows and bounds.

    Only diagonal quadratic terms are representable; convexity is therefore
    the requirement quad >= 0, which validate() enforces.
    """

    is_quadratic = True

    def __init__(self, name: str = ""):
        super().__init__(sense="min", name=name)
        self._quad: list[float] = []

    def add_var(self, lb=0.0, ub=np.inf, obj=0.0, name="", quad=0.0) -> int:
        j = super().add_var(lb, ub, obj, name)
        self._quad.append(float(quad))
        return j

    @property
    def quad(self) -> np.ndarray:
        return np.array(self._quad)

    def validate(self) -> None:
        super().validate()
        if any(q < -1e-12 for q in self._quad):
            raise NonConvexError("quadratic objective has a negative diagonal entry")


@dataclass
class SolveOutcome:
    """Result of one solve: status, point, objective and wall time.

    `x` and `objective` are present exactly when status == "optimal"
    (or when a limit was hit with an incumbent available).
    """

    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    wall_time_s: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


# -- evaluation helpers ------------------------------------------------------


def objective_value(p: LinearProgram, x: np.ndarray) -> float:
    """Evaluate a program's objective at a point, constant term included."""
    x = np.asarray(x, dtype=float)
    val = float(np.dot(p.obj, x)) + p.constant
    if p.is_quadratic:
        val += float(np.dot(p.quad, x * x))
    return val


def row_activity(row: Row, x: np.ndarray) -> float:
    return float(np.dot(row.coef, x[row.idx]))


def max_violation(p: LinearProgram, x: np.ndarray) -> float:
    """Largest absolute constraint/bound violation of x. 0 means feasible."""
    x = np.asarray(x, dtype=float)
    worst = 0.0
    worst = max(worst, float(np.max(p.lb - x, initial=0.0)))
    ub = p.ub
    finite = np.isfinite(ub)
    if finite.any():
        worst = max(worst, float(np.max((x - ub)[finite], initial=0.0)))
    for row in p.rows:
        act = row_activity(row, x)
        if row.relation == LESS:
            worst = max(worst, act - row.rhs)
        elif row.relation == GREATER:
            worst = max(worst, row.rhs - act)
        else:
            worst = max(worst, abs(act - row.rhs))
    return worst


def max_integrality_violation(p: LinearProgram, x: np.ndarray) -> float:
    mask = p.binary
    if not mask.any():
        return 0.0
    vals = np.asarray(x, dtype=float)[mask]
    return float(np.max(np.abs(vals - np.round(vals))))
