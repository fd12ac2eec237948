"""Seeded instance generators for the three benchmark game families.

All randomness flows through numpy's Philox counter-based generator keyed on
the params' seed, so identical params reproduce identical instances bit for
bit (and the generator is documented and portable across platforms).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .game import FiniteUniverse, GameInstance, InspectionFamily

MAX_GROUND_SET = 8


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _randint(rng, lo: int, hi: int) -> int:
    """Uniform integer inclusive of both endpoints."""
    return int(rng.integers(lo, hi + 1))


@dataclass
class InspectionParams:
    """Inspector picks a subset of size <= p, inspectee of size <= q.

    Payoffs depend only on whether the chosen subsets intersect; k nominal
    follower payoff pairs are drawn per instance.
    """

    s: int
    p: int
    q: int
    k: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.s <= MAX_GROUND_SET:
            raise ValueError(f"ground set size must be in 1..{MAX_GROUND_SET}")
        if not (0 < self.p <= self.s and 0 < self.q <= self.s):
            raise ValueError("subset caps must satisfy 0 < p, q <= s")
        if self.k < 1:
            raise ValueError("need at least one nominal follower utility")


@dataclass
class CournotParams:
    """Two firms pick quantities on the grid {1, ..., n}; payoffs are
    price times own quantity minus own cost, min-max normalized per matrix."""

    n: int
    k: int = 1
    seed: int = 0
    demand_slope: tuple[int, int] = (1, 10)
    leader_cost_fixed: tuple[int, int] = (10, 40)
    leader_cost_unit: tuple[int, int] = (10, 20)
    follower_cost_fixed: tuple[int, int] = (2, 20)
    follower_cost_unit: tuple[int, int] = (1, 5)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two quantity levels")
        if self.k < 1:
            raise ValueError("need at least one follower utility")


@dataclass
class SyntheticParams:
    """Leader and k follower payoff matrices drawn iid uniform on [0, 1]."""

    n: int
    m: int
    k: int = 1
    seed: int = 0

    def __post_init__(self):
        if min(self.n, self.m, self.k) < 1:
            raise ValueError("n, m, k must all be at least 1")


def subsets_up_to(s: int, cap: int) -> list[tuple[int, ...]]:
    """All non-empty subsets of {0..s-1} of size at most cap, size then lex order."""
    out = []
    for size in range(1, cap + 1):
        out.extend(itertools.combinations(range(s), size))
    return out


def gen_inspection(params: InspectionParams) -> GameInstance:
    """Inspection instance: leader payoff 0.5 on intersecting cells, 0 off.

    Each nominal follower payoff draws the intersecting-cell value uniformly
    in [0.3, 0.6) (getting caught is bad for the inspectee) and the
    non-intersecting value in [0.7, 1).
    """
    rng = _rng(params.seed)
    leader_sets = subsets_up_to(params.s, params.p)
    follower_sets = subsets_up_to(params.s, params.q)
    n, m = len(leader_sets), len(follower_sets)
    assert n == sum(comb(params.s, i) for i in range(1, params.p + 1))
    mask = np.zeros((n, m), dtype=bool)
    for i, a_set in enumerate(leader_sets):
        sa = set(a_set)
        for j, b_set in enumerate(follower_sets):
            mask[i, j] = bool(sa.intersection(b_set))
    nominal = np.column_stack([
        rng.uniform(0.3, 0.6, size=params.k),
        rng.uniform(0.7, 1.0, size=params.k),
    ])
    u_l = np.where(mask, 0.5, 0.0)
    family = InspectionFamily(mask, nominal)
    return GameInstance(u_l, family,
                        name=f"inspection-s{params.s}p{params.p}q{params.q}k{params.k}")


def _normalize(u: np.ndarray) -> np.ndarray:
    lo, hi = u.min(), u.max()
    if hi - lo < 1e-12:
        return np.zeros_like(u)
    return (u - lo) / (hi - lo)


def gen_cournot(params: CournotParams) -> GameInstance:
    """Quantity duopoly on integer grids, coefficients drawn per matrix."""
    rng = _rng(params.seed)
    n = params.n
    y1 = np.arange(1, n + 1)[:, None]
    y2 = np.arange(1, n + 1)[None, :]

    def leader_matrix():
        slope = _randint(rng, *params.demand_slope)
        c_fixed = _randint(rng, *params.leader_cost_fixed)
        c_unit = _randint(rng, *params.leader_cost_unit)
        price = 75.0 - slope * (y1 + y2)
        return _normalize(price * y1 - (c_fixed + c_unit * y1))

    def follower_matrix():
        slope = _randint(rng, *params.demand_slope)
        c_fixed = _randint(rng, *params.follower_cost_fixed)
        c_unit = _randint(rng, *params.follower_cost_unit)
        price = 75.0 - slope * (y1 + y2)
        return _normalize(price * y2 - (c_fixed + c_unit * y2))

    u_l = leader_matrix()
    followers = [follower_matrix() for _ in range(params.k)]
    return GameInstance(u_l, FiniteUniverse(followers),
                        name=f"cournot-n{n}k{params.k}")


def gen_synthetic(params: SyntheticParams) -> GameInstance:
    rng = _rng(params.seed)
    u_l = rng.uniform(size=(params.n, params.m))
    followers = [rng.uniform(size=(params.n, params.m)) for _ in range(params.k)]
    return GameInstance(u_l, FiniteUniverse(followers),
                        name=f"synthetic-n{params.n}m{params.m}k{params.k}")
