"""Debug dump of any program in CPLEX-LP text format."""

from __future__ import annotations

import numpy as np

from .model import EQUAL, GREATER, LESS, LinearProgram

_REL = {LESS: "<=", EQUAL: "=", GREATER: ">="}


def _term(coef: float, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    return f"{sign} {mag:.12g} {name} "


def write_lp_text(p: LinearProgram) -> str:
    names = p.var_names
    out = []
    out.append("Maximize" if p.sense == "max" else "Minimize")
    line = " obj: "
    first = True
    for j, c in enumerate(p.obj):
        if c != 0.0:
            line += _term(c, names[j], first)
            first = False
    if p.is_quadratic and np.any(p.quad != 0.0):
        line += "+ [ " if not first else "[ "
        qfirst = True
        for j, q in enumerate(p.quad):
            if q != 0.0:
                line += _term(2.0 * q, f"{names[j]} ^2", qfirst)
                qfirst = False
        line += "] / 2 "
        first = False
    if first:
        line += "0 " + names[0] if names else "0"
    out.append(line.rstrip())
    out.append("Subject To")
    for r, row in enumerate(p.rows):
        line = f" {row.name or f'c{r}'}: "
        first = True
        for j, c in zip(row.idx, row.coef):
            line += _term(float(c), names[int(j)], first)
            first = False
        if first:
            line += "0 " + names[0] + " "
        line += f"{_REL[row.relation]} {row.rhs:.12g}"
        out.append(line)
    out.append("Bounds")
    lb, ub = p.lb, p.ub
    binary = p.binary
    for j in range(p.n_vars):
        if binary[j]:
            continue
        lo = "-inf" if np.isneginf(lb[j]) else f"{lb[j]:.12g}"
        hi = "+inf" if np.isposinf(ub[j]) else f"{ub[j]:.12g}"
        if lo == "-inf" and hi == "+inf":
            out.append(f" {names[j]} free")
        else:
            out.append(f" {lo} <= {names[j]} <= {hi}")
    if binary.any():
        out.append("Binaries")
        out.append(" " + " ".join(names[j] for j in np.flatnonzero(binary)))
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp_file(p: LinearProgram, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_lp_text(p))
