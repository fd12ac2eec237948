"""Solve dispatch: one swappable backend contract for LP, MILP and QP.

The default backend is HiGHS through scipy; a pure-numpy simplex plus branch
and bound ships as a fallback so everything still runs where scipy's native
HiGHS is unavailable. Each solve validates the program first, optionally
dumps it in LP format (debug hook used by the CLI), and verifies the returned
point against the program before handing it back.
"""

from __future__ import annotations

import os
from pathlib import Path

from .model import (
    EQUAL,
    FEAS_TOL,
    GREATER,
    INFEASIBLE,
    INTEGRALITY_TOL,
    KKT_TOL,
    LESS,
    LIMIT,
    OPTIMAL,
    UNBOUNDED,
    BackendUnavailableError,
    LinearProgram,
    MixedIntegerProgram,
    ModelError,
    NonConvexError,
    NumericalFailureError,
    QuadraticProgram,
    SolveOutcome,
    SolverError,
    max_integrality_violation,
    max_violation,
    objective_value,
)
from .lpfile import write_lp_file, write_lp_text
from .qp import solve_qp_active_set
from .reference_backend import ReferenceBackend

# post-solve acceptance: generous multiple of the solver tolerance so that
# big-M rows (coefficients up to M=2) do not trip spurious failures
_VERIFY_TOL = 1e-5

_dump_dir: Path | None = None
_dump_count = 0


def set_debug_dump_dir(path=None) -> None:
    """Direct every subsequently solved program to `path` as .lp files."""
    global _dump_dir, _dump_count
    _dump_dir = None if path is None else Path(path)
    _dump_count = 0
    if _dump_dir is not None:
        _dump_dir.mkdir(parents=True, exist_ok=True)


def _maybe_dump(p: LinearProgram) -> None:
    global _dump_count
    if _dump_dir is None:
        return
    stem = (p.name or "program").replace(os.sep, "_").replace(" ", "_")
    write_lp_file(p, _dump_dir / f"{_dump_count:05d}_{stem}.lp")
    _dump_count += 1


def get_backend(backend=None):
    """Resolve a backend argument: None, a name, or a backend instance."""
    if backend is None or backend == "scipy":
        try:
            from .scipy_backend import ScipyHighsBackend
            return ScipyHighsBackend()
        except ImportError as exc:
            if backend == "scipy":
                raise BackendUnavailableError(f"scipy backend unavailable: {exc}")
            return ReferenceBackend()
    if backend == "reference":
        return ReferenceBackend()
    if hasattr(backend, "solve_lp"):
        return backend
    raise BackendUnavailableError(f"unknown backend {backend!r}")


def _verify(p: LinearProgram, out: SolveOutcome) -> SolveOutcome:
    if out.status != OPTIMAL or out.x is None:
        return out
    viol = max_violation(p, out.x)
    if viol > _VERIFY_TOL:
        raise NumericalFailureError(
            f"backend returned an infeasible point (violation {viol:.2e})")
    if p.is_integer:
        intviol = max_integrality_violation(p, out.x)
        if intviol > 10 * INTEGRALITY_TOL:
            raise NumericalFailureError(
                f"binary variable fractional by {intviol:.2e} at optimum")
    return out


def solve_lp(p: LinearProgram, backend=None, time_limit: float | None = None) -> SolveOutcome:
    p.validate()
    _maybe_dump(p)
    return _verify(p, get_backend(backend).solve_lp(p, time_limit=time_limit))


def solve_milp(p: MixedIntegerProgram, backend=None, time_limit: float | None = None) -> SolveOutcome:
    p.validate()
    _maybe_dump(p)
    return _verify(p, get_backend(backend).solve_milp(p, time_limit=time_limit))


def solve_qp(p: QuadraticProgram, backend=None, time_limit: float | None = None) -> SolveOutcome:
    p.validate()
    _maybe_dump(p)
    return _verify(p, solve_qp_active_set(p, get_backend(backend), time_limit=time_limit))
