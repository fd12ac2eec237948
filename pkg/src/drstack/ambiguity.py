"""Distributions over follower payoffs and the ambiguity sets around them.

Two ambiguity shapes are supported: a polytope of weight vectors over a fixed
finite support, and a transport (Wasserstein) ball of radius theta around a
finitely supported nominal distribution. Both reduce the worst-case
expectation of a payoff vector to a single LP.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import solver
from .solver import LinearProgram, OPTIMAL


@dataclass(frozen=True)
class FrobeniusMetric:
    """Entrywise-l2 ground distance between payoff matrices."""

    kind = "frobenius"

    def __call__(self, u1: np.ndarray, u2: np.ndarray) -> float:
        return ground_distance(self, u1, u2)


def ground_distance(metric, u1, u2) -> float:
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if u1.shape != u2.shape:
        raise ValueError(f"matrix shapes differ: {u1.shape} vs {u2.shape}")
    if isinstance(metric, FrobeniusMetric):
        return float(np.sqrt(np.sum((u1 - u2) ** 2)))
    raise ValueError(f"unsupported ground metric {metric!r}")


def pairwise_distance_pow(metric, support_a, support_b, t: float) -> np.ndarray:
    """Matrix of d(u_a, u_b)^t for all pairs; the transport LP cost."""
    out = np.empty((len(support_a), len(support_b)))
    for i, ua in enumerate(support_a):
        for j, ub in enumerate(support_b):
            out[i, j] = ground_distance(metric, ua, ub) ** t
    return out


@dataclass
class Distribution:
    """Finitely supported probability measure over follower payoff matrices."""

    support: list[np.ndarray]
    weights: np.ndarray

    def __post_init__(self):
        self.support = [np.asarray(u, dtype=float) for u in self.support]
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.support) != self.weights.size:
            raise ValueError("support and weights lengths differ")
        if self.weights.min() < -1e-12 or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must form a probability vector")

    @property
    def k(self) -> int:
        return len(self.support)

    @staticmethod
    def uniform(support) -> "Distribution":
        k = len(support)
        return Distribution(list(support), np.full(k, 1.0 / k))

    @staticmethod
    def point_mass(u) -> "Distribution":
        return Distribution([u], np.array([1.0]))

    def to_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "support": [[float(v) for v in u.ravel()] for u in self.support],
        }

    @staticmethod
    def from_dict(doc: dict, game=None) -> "Distribution":
        support = []
        for entry in doc["support"]:
            if isinstance(entry, int):
                if game is None:
                    raise ValueError("index-form support needs a game with a finite universe")
                support.append(game.nominal_utilities()[entry])
            else:
                if game is None:
                    raise ValueError("matrix-form support needs a game for its shape")
                support.append(np.array(entry, dtype=float).reshape(game.n, game.m))
        return Distribution(support, np.array(doc["weights"], dtype=float))


@dataclass
class PolytopeAmbiguity:
    """{mu in the k-simplex : A mu <= b} over a fixed finite support.

    Non-emptiness is checked with one feasibility LP at construction.
    """

    support: list[np.ndarray]
    A: np.ndarray
    b: np.ndarray

    kind = "polytope"

    def __post_init__(self):
        self.support = [np.asarray(u, dtype=float) for u in self.support]
        k = len(self.support)
        self.A = np.asarray(self.A, dtype=float).reshape(-1, k) if np.size(self.A) else np.zeros((0, k))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[0] != self.b.size:
            raise ValueError("A and b row counts differ")
        if self._feasibility_check() is None:
            raise ValueError("polytope ambiguity set is empty")

    @property
    def k(self) -> int:
        return len(self.support)

    def _feasibility_check(self):
        lp = LinearProgram(sense="min", name="polytope-feasibility")
        mu = lp.add_vars(self.k, lb=0.0, ub=1.0, prefix="mu")
        lp.add_row(mu, np.ones(self.k), "=", 1.0)
        for r in range(self.A.shape[0]):
            lp.add_row(mu, self.A[r], "<=", float(self.b[r]))
        out = solver.solve_lp(lp)
        return out.x if out.status == OPTIMAL else None

    @staticmethod
    def singleton(dist: Distribution) -> "PolytopeAmbiguity":
        k = dist.k
        A = np.vstack([np.eye(k), -np.eye(k)])
        b = np.concatenate([dist.weights, -dist.weights])
        return PolytopeAmbiguity(dist.support, A, b)

    @staticmethod
    def full_simplex(support) -> "PolytopeAmbiguity":
        k = len(support)
        return PolytopeAmbiguity(list(support), np.zeros((0, k)), np.zeros(0))


@dataclass
class WassersteinBall:
    """All distributions within transport distance `radius` of `nominal`."""

    nominal: Distribution
    radius: float
    exponent: float = 2.0
    metric: FrobeniusMetric = field(default_factory=FrobeniusMetric)

    kind = "wasserstein"

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if self.exponent < 1:
            raise ValueError("exponent must be at least 1")

    @property
    def k(self) -> int:
        return self.nominal.k

    def radius_pow(self) -> float:
        return float(self.radius) ** float(self.exponent)


def wasserstein_primal(mu: Distribution, nu: Distribution, t: float = 2.0,
                       metric=None, backend=None) -> tuple[float, np.ndarray]:
    """Transport LP between two finitely supported distributions.

    Returns (W_t(mu, nu), plan) where plan[i, j] moves mass from mu's i-th
    support point to nu's j-th; its marginals match mu and nu within 1e-7.
    """
    metric = metric or FrobeniusMetric()
    cost = pairwise_distance_pow(metric, mu.support, nu.support, t)
    ki, kj = mu.k, nu.k
    lp = LinearProgram(sense="min", name="transport-primal")
    g = lp.add_vars(ki * kj, lb=0.0, obj=0.0, prefix="g")
    lp.set_obj(g, cost.ravel())
    gm = g.reshape(ki, kj)
    for i in range(ki):
        lp.add_row(gm[i], np.ones(kj), "=", float(mu.weights[i]))
    for j in range(kj):
        lp.add_row(gm[:, j], np.ones(ki), "=", float(nu.weights[j]))
    out = solver.solve_lp(lp, backend=backend)
    if out.status != OPTIMAL:
        raise solver.NumericalFailureError(f"transport LP ended with status {out.status}")
    plan = out.x.reshape(ki, kj)
    return float(max(out.objective, 0.0)) ** (1.0 / t), plan


def wasserstein_dual(mu: Distribution, nu: Distribution, t: float = 2.0,
                     metric=None, backend=None) -> float:
    """Dual transport LP; its value equals wasserstein_primal(...)^t."""
    metric = metric or FrobeniusMetric()
    cost = pairwise_distance_pow(metric, mu.support, nu.support, t)
    ki, kj = mu.k, nu.k
    lp = LinearProgram(sense="max", name="transport-dual")
    r = lp.add_vars(ki, lb=-np.inf, prefix="r")
    s = lp.add_vars(kj, lb=-np.inf, prefix="s")
    lp.set_obj(r, mu.weights)
    lp.set_obj(s, nu.weights)
    for i in range(ki):
        for j in range(kj):
            lp.add_row([r[i], s[j]], [1.0, 1.0], "<=", float(cost[i, j]))
    out = solver.solve_lp(lp, backend=backend)
    if out.status != OPTIMAL:
        raise solver.NumericalFailureError(f"dual transport LP ended with status {out.status}")
    return float(out.objective)


def worstcase_expectation(amb, values, support=None, backend=None) -> tuple[float, np.ndarray]:
    """min over admissible distributions of E[values], plus an attaining one.

    For a polytope the LP is over the weight vector directly. For a ball the
    LP is over the transport plan from the candidate support (defaulting to
    the nominal's own support) to the nominal, with total moving cost at most
    radius^exponent; the attaining weights are the plan's row sums. Which
    optimal vertex is returned is backend-dependent; only the value is pinned.
    """
    values = np.asarray(values, dtype=float).ravel()
    if isinstance(amb, PolytopeAmbiguity):
        if values.size != amb.k:
            raise ValueError("value vector length must match the polytope support")
        lp = LinearProgram(sense="min", name="worstcase-polytope")
        mu = lp.add_vars(amb.k, lb=0.0, ub=1.0, prefix="mu")
        lp.set_obj(mu, values)
        lp.add_row(mu, np.ones(amb.k), "=", 1.0)
        for rr in range(amb.A.shape[0]):
            lp.add_row(mu, amb.A[rr], "<=", float(amb.b[rr]))
        out = solver.solve_lp(lp, backend=backend)
        if out.status != OPTIMAL:
            raise solver.NumericalFailureError(f"worst-case LP status {out.status}")
        return float(out.objective), out.x

    if isinstance(amb, WassersteinBall):
        cand = amb.nominal.support if support is None else list(support)
        if values.size != len(cand):
            raise ValueError("value vector length must match the candidate support")
        cost = pairwise_distance_pow(amb.metric, cand, amb.nominal.support, amb.exponent)
        ki, kj = len(cand), amb.k
        lp = LinearProgram(sense="min", name="worstcase-ball")
        g = lp.add_vars(ki * kj, lb=0.0, prefix="g")
        gm = g.reshape(ki, kj)
        lp.set_obj(g, np.repeat(values, kj))
        for j in range(kj):
            lp.add_row(gm[:, j], np.ones(ki), "=", float(amb.nominal.weights[j]))
        lp.add_row(g, cost.ravel(), "<=", amb.radius_pow())
        out = solver.solve_lp(lp, backend=backend)
        if out.status != OPTIMAL:
            raise solver.NumericalFailureError(f"worst-case LP status {out.status}")
        plan = out.x.reshape(ki, kj)
        return float(out.objective), plan.sum(axis=1)

    raise ValueError(f"unsupported ambiguity set {amb!r}")
