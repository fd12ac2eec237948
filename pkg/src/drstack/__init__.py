"""Distributionally robust strong Stackelberg solvers.

A leader commits to a mixed strategy while the follower's payoff matrix is
uncertain: it follows some distribution known only to lie in an ambiguity
set (a polytope over a finite support, or a transport ball around a nominal
estimate). The library computes leader strategies maximizing the worst-case
expected payoff, via mapping enumeration, big-M MIPs, and an incremental
MIP with pluggable separation oracles for infinite universes.
"""

from .ambiguity import (
    Distribution,
    FrobeniusMetric,
    PolytopeAmbiguity,
    WassersteinBall,
    ground_distance,
    wasserstein_dual,
    wasserstein_primal,
    worstcase_expectation,
)
from .baselines import bayesian_mip, enumeration_lp_baseline
from .finite import (
    BigMConfig,
    DrsssSolution,
    EnumerationGuardError,
    solve_by_enumeration,
    solve_by_mip,
    solve_wasserstein_finite_mip,
)
from .game import (
    BoxUniverse,
    FiniteUniverse,
    GameInstance,
    InspectionFamily,
    best_response_set,
    follower_expected_payoffs,
    game_from_dict,
    game_to_dict,
    leader_worstcase_value,
    strong_tiebreak_payoff,
)
from .games import (
    CournotParams,
    InspectionParams,
    SyntheticParams,
    gen_cournot,
    gen_inspection,
    gen_synthetic,
)
from .incremental import (
    AlgorithmConfig,
    BoxFrobeniusOracle,
    FiniteSetOracle,
    InspectionOracle,
    MasterState,
    OracleResult,
    SeparationOracle,
    build_master_mip,
    default_oracle,
    dump_iteration_log,
    run_algorithm1,
    separate,
    termination_certificate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
