"""Normal-form Stackelberg game model and follower best-response machinery.

The leader commits to a mixed strategy x over n actions; the follower
observes x and plays a pure action. Leader payoffs are a fixed n-by-m matrix
in [0, 1]; the follower's payoff matrix is uncertain and ranges over a
universe that is either a finite list, the full unit box, or the two-payoff
inspection family.

Ties in the follower's best-response set are broken in the leader's favor
(strong tie-breaking); residual ties go to the lowest action index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_BR_TOL = 1e-9


def _as_payoff_matrix(u, n=None, m=None) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 2:
        raise ValueError(f"payoff matrix must be 2-d, got shape {u.shape}")
    if n is not None and u.shape != (n, m):
        raise ValueError(f"payoff matrix shape {u.shape} does not match game ({n}, {m})")
    if u.min() < -1e-12 or u.max() > 1 + 1e-12:
        raise ValueError("payoffs must lie in [0, 1]")
    return u


@dataclass
class FiniteUniverse:
    """A finite list of candidate follower payoff matrices."""

    utilities: list[np.ndarray]

    kind = "finite"

    def __post_init__(self):
        if not self.utilities:
            raise ValueError("finite universe must be non-empty")
        self.utilities = [_as_payoff_matrix(u) for u in self.utilities]

    @property
    def k(self) -> int:
        return len(self.utilities)


@dataclass
class BoxUniverse:
    """Every matrix in [0, 1]^(n x m); dimensions live on the game."""

    kind = "box"


@dataclass
class InspectionFamily:
    """Two-parameter follower payoffs: one value on intersecting cells, one off.

    `mask[i, a]` is True when leader action i and follower action a intersect.
    A family member is hit_payoff * mask + miss_payoff * (1 - mask) with both
    payoffs in [0, 1]. `nominal_params` stores the k observed (hit, miss)
    pairs that seed the nominal distribution.
    """

    mask: np.ndarray
    nominal_params: np.ndarray   # (k, 2): columns hit_payoff, miss_payoff

    kind = "inspection"

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        self.nominal_params = np.asarray(self.nominal_params, dtype=float)
        if self.nominal_params.ndim != 2 or self.nominal_params.shape[1] != 2:
            raise ValueError("nominal_params must have shape (k, 2)")
        if self.nominal_params.min() < 0 or self.nominal_params.max() > 1:
            raise ValueError("inspection payoff parameters must lie in [0, 1]")

    @property
    def k(self) -> int:
        return self.nominal_params.shape[0]

    @property
    def intersect_count(self) -> int:
        return int(self.mask.sum())

    def member(self, hit_payoff: float, miss_payoff: float) -> np.ndarray:
        return np.where(self.mask, float(hit_payoff), float(miss_payoff))

    def utilities(self) -> list[np.ndarray]:
        return [self.member(a, b) for a, b in self.nominal_params]


@dataclass
class GameInstance:
    u_l: np.ndarray
    universe: FiniteUniverse | BoxUniverse | InspectionFamily
    name: str = ""

    def __post_init__(self):
        self.u_l = _as_payoff_matrix(self.u_l)
        if isinstance(self.universe, FiniteUniverse):
            for u in self.universe.utilities:
                _as_payoff_matrix(u, self.n, self.m)
        elif isinstance(self.universe, InspectionFamily):
            if self.universe.mask.shape != self.u_l.shape:
                raise ValueError("inspection mask shape must match leader payoffs")
        self.u_l.flags.writeable = False

    @property
    def n(self) -> int:
        return self.u_l.shape[0]

    @property
    def m(self) -> int:
        return self.u_l.shape[1]

    def nominal_utilities(self) -> list[np.ndarray]:
        """The k observed follower payoff matrices carried by the universe."""
        if isinstance(self.universe, FiniteUniverse):
            return list(self.universe.utilities)
        if isinstance(self.universe, InspectionFamily):
            return self.universe.utilities()
        raise ValueError("a box universe carries no nominal members")


def as_mixed_strategy(x, n=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if n is not None and x.shape != (n,):
        raise ValueError(f"strategy length {x.shape} does not match {n} actions")
    if x.min() < -1e-9 or abs(x.sum() - 1.0) > 1e-9:
        raise ValueError("mixed strategy must be a probability vector")
    return x


def follower_expected_payoffs(game: GameInstance, u_f, x) -> np.ndarray:
    """Expected follower payoff of each pure action under leader strategy x."""
    u_f = _as_payoff_matrix(u_f, game.n, game.m)
    x = as_mixed_strategy(x, game.n)
    return x @ u_f


def best_response_set(game: GameInstance, u_f, x, tol: float = DEFAULT_BR_TOL) -> np.ndarray:
    """Indices of follower actions within tol of the best expected payoff."""
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    payoffs = follower_expected_payoffs(game, u_f, x)
    return np.flatnonzero(payoffs >= payoffs.max() - tol)

def strong_tiebreak_payoff(game: GameInstance, u_f, x,
                           tol: float = DEFAULT_BR_TOL) -> tuple[float, int]:
    """Leader payoff when the follower best-responds, breaking ties leader-side.

    Among the follower's (tol-)best responses, the action with the highest
    leader expected payoff is chosen; among leader-payoff ties, the lowest
    action index.
    """
    br = best_response_set(game, u_f, x, tol)
    leader = as_mixed_strategy(x, game.n) @ game.u_l
    chosen = br[int(np.argmax(leader[br]))]
    return float(leader[chosen]), int(chosen)


def leader_worstcase_value(game: GameInstance, amb, x, tol: float = DEFAULT_BR_TOL) -> float:
    """Worst-case expected leader payoff of x over the ambiguity set.

    Only finitely supported ambiguity is evaluated pointwise: the candidate
    worst-case distributions reweight the universe's (or the ball nominal's)
    finite support. A box universe needs the incremental algorithm instead.
    """
    from . import ambiguity

    if isinstance(game.universe, BoxUniverse):
        raise ValueError("worst case over a box universe requires a separation oracle")
    support = game.nominal_utilities()
    if isinstance(amb, ambiguity.PolytopeAmbiguity):
        support = amb.support
    values = np.array([strong_tiebreak_payoff(game, u, x, tol)[0] for u in support])
    value, _ = ambiguity.worstcase_expectation(amb, values, support=support)
    return value


# -- serialization -----------------------------------------------------------
# Game JSON: {"n", "m", "u_l": row-major flat list, "follower": {"kind": ...}}


def game_to_dict(game: GameInstance) -> dict:
    doc = {
        "n": game.n,
        "m": game.m,
        "u_l": [float(v) for v in game.u_l.ravel()],
    }
    uni = game.universe
    if isinstance(uni, FiniteUniverse):
        doc["follower"] = {
            "kind": "finite",
            "utilities": [[float(v) for v in u.ravel()] for u in uni.utilities],
        }
    elif isinstance(uni, BoxUniverse):
        doc["follower"] = {"kind": "box"}
    else:
        doc["follower"] = {
            "kind": "inspection",
            "mask": [int(v) for v in uni.mask.ravel()],
            "nominal_params": [[float(a), float(b)] for a, b in uni.nominal_params],
        }
    if game.name:
        doc["name"] = game.name
    return doc


def game_from_dict(doc: dict) -> GameInstance:
    n, m = int(doc["n"]), int(doc["m"])
    u_l = np.array(doc["u_l"], dtype=float).reshape(n, m)
    fol = doc["follower"]
    kind = fol["kind"]
    if kind == "finite":
        universe = FiniteUniverse([np.array(u, dtype=float).reshape(n, m)
                                   for u in fol["utilities"]])
    elif kind == "box":
        universe = BoxUniverse()
    elif kind == "inspection":
        universe = InspectionFamily(
            np.array(fol["mask"], dtype=int).reshape(n, m).astype(bool),
            np.array(fol["nominal_params"], dtype=float))
    else:
        raise ValueError(f"unknown follower universe kind {kind!r}")
    return GameInstance(u_l, universe, name=doc.get("name", ""))
