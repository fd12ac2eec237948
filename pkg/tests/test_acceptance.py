"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the pass/fail lines.
The whole module is sized for a laptop: the heaviest criteria are the
grid-oracle comparison (4) and the runtime-trend sweeps (7).
"""

import time

import numpy as np
from scipy.stats import spearmanr

import drstack as ds
from drstack.baselines import bayesian_mip, enumeration_lp_baseline
from drstack.bench import ExperimentConfig, run_sweep, summarize
from drstack.finite import build_wasserstein_finite_mip
from drstack.incremental import AlgorithmConfig, BoxFrobeniusOracle, InspectionOracle, MasterState, separate

import oracles


def report(number: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


def random_game(rng, n, m, k):
    return ds.GameInstance(rng.uniform(size=(n, m)),
                           ds.FiniteUniverse([rng.uniform(size=(n, m)) for _ in range(k)]))


def uniform_ball(game, radius, t=2.0):
    return ds.WassersteinBall(ds.Distribution.uniform(game.nominal_utilities()),
                              radius, t)


def test_criterion_1_method_agreement():
    """Four finite-support routes agree pairwise within 1e-5 on 100 games."""
    rng = np.random.default_rng(101)
    worst = 0.0
    t0 = time.perf_counter()
    for trial in range(100):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(2, 5))
        k = int(rng.integers(1, 4))
        g = random_game(rng, n, m, k)
        theta = float(rng.choice([0.0, 0.05, 0.1, 0.3, 1.0]))
        t = float(rng.choice([1.0, 2.0]))
        ball = uniform_ball(g, theta, t)
        values = [
            ds.solve_by_enumeration(g, ball).value,
            ds.solve_by_mip(g, ball).value,
            ds.solve_wasserstein_finite_mip(g, ball).value,
            enumeration_lp_baseline(g, ball).value,
        ]
        worst = max(worst, max(values) - min(values))
        if trial % 3 == 0:
            amb = ds.PolytopeAmbiguity.full_simplex(g.universe.utilities)
            pair = [ds.solve_by_enumeration(g, amb).value, ds.solve_by_mip(g, amb).value]
            worst = max(worst, abs(pair[0] - pair[1]))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-5
    report(1, ok, f"100 games, max pairwise gap {worst:.2e} (tol 1e-5), {elapsed:.0f}s")
    assert ok


def test_criterion_2_reduction_chain():
    """Zero radius -> Bayesian; huge radius -> robust; one utility -> classical."""
    rng = np.random.default_rng(102)
    gap_bayes = gap_robust = gap_sse = 0.0
    for _ in range(30):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(2, 4))
        k = int(rng.integers(1, 4))
        g = random_game(rng, n, m, k)
        nu = ds.Distribution.uniform(g.nominal_utilities())

        zero = ds.solve_wasserstein_finite_mip(g, ds.WassersteinBall(nu, 0.0)).value
        bay = bayesian_mip(g, nu).value
        gap_bayes = max(gap_bayes, abs(zero - bay))

        utilities = g.universe.utilities
        diameter = max(ds.ground_distance(ds.FrobeniusMetric(), a, b)
                       for a in utilities for b in utilities)
        huge = ds.solve_wasserstein_finite_mip(
            g, ds.WassersteinBall(nu, diameter + 0.05)).value
        robust = ds.solve_by_mip(g, ds.PolytopeAmbiguity.full_simplex(utilities)).value
        gap_robust = max(gap_robust, abs(huge - robust))

        solo = ds.GameInstance(g.u_l, ds.FiniteUniverse([utilities[0]]))
        sse_dr = ds.solve_wasserstein_finite_mip(
            solo, ds.WassersteinBall(ds.Distribution.point_mass(utilities[0]), 0.0)).value
        sse_ref = oracles.sse_multiple_lp(g.u_l, utilities[0])
        gap_sse = max(gap_sse, abs(sse_dr - sse_ref))
    ok = gap_bayes <= 1e-6 and gap_robust <= 1e-5 and gap_sse <= 1e-6
    report(2, ok, f"30 instances; gaps bayes {gap_bayes:.2e} (1e-6), "
                  f"robust {gap_robust:.2e} (1e-5), sse {gap_sse:.2e} (1e-6)")
    assert ok


def test_criterion_3_wasserstein_duality():
    """Primal transport value^t equals the dual LP within 1e-6, 200 pairs."""
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(200):
        k1 = int(rng.integers(1, 7))
        k2 = int(rng.integers(1, 7))
        t = float(rng.choice([1.0, 2.0]))
        shape = (int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        mu = ds.Distribution([rng.uniform(size=shape) for _ in range(k1)],
                             rng.dirichlet(np.ones(k1)))
        nu = ds.Distribution([rng.uniform(size=shape) for _ in range(k2)],
                             rng.dirichlet(np.ones(k2)))
        primal, _ = ds.wasserstein_primal(mu, nu, t)
        dual = ds.wasserstein_dual(mu, nu, t)
        worst = max(worst, abs(primal ** t - dual))
    ok = worst <= 1e-6
    report(3, ok, f"200 pairs, max |primal^t - dual| = {worst:.2e} (tol 1e-6)")
    assert ok


# shared between criteria 4 and 5 so the certificate checks the same runs
_ALGORITHM1_RUNS = []


def _inspection_runs():
    if _ALGORITHM1_RUNS:
        return _ALGORITHM1_RUNS
    for s in (3, 4):
        for k in (1, 2):
            g = ds.gen_inspection(ds.InspectionParams(s, 1, 1, k, seed=40 + s + k))
            ball = uniform_ball(g, 0.1, t=2.0)
            cfg = AlgorithmConfig(big_m=2.0, tol_gamma=1e-6, max_iter=50)
            sol = ds.run_algorithm1(g, ball, cfg=cfg)
            _ALGORITHM1_RUNS.append((g, ball, sol))
    return _ALGORITHM1_RUNS


def test_criterion_4_algorithm1_vs_grid_oracle():
    """Converged incremental solves match the sampled grid oracle to 5e-3."""
    worst = 0.0
    iters = []
    t0 = time.perf_counter()
    for g, ball, sol in _inspection_runs():
        assert sol.diagnostics["converged"], "incremental solve did not converge"
        iters.append(sol.diagnostics["n_iterations"])
        expected = oracles.inspection_grid_oracle(g, ball, divisor=100,
                                                  n_samples=10_000, seed=7)
        worst = max(worst, abs(sol.value - expected))
    elapsed = time.perf_counter() - t0
    ok = worst <= 5e-3 and max(iters) <= 50
    report(4, ok, f"4 inspection instances, max |alg - oracle| = {worst:.2e} "
                  f"(tol 5e-3), iterations <= {max(iters)}, {elapsed:.0f}s")
    assert ok


def test_criterion_5_termination_certificate():
    """Sampled semi-infinite constraints hold at every exit within 1e-5."""
    worst = np.inf
    for g, ball, sol in _inspection_runs():
        margin = ds.termination_certificate(g, ball, sol, n_probes=50,
                                            rng=np.random.default_rng(55))
        worst = min(worst, margin)
    ok = worst >= -1e-5
    report(5, ok, f"min probe margin {worst:.2e} (tol -1e-5)")
    assert ok


def test_criterion_6_monotonicity_and_dominance():
    """Value non-increasing in the radius; the non-robust value dominates."""
    rng = np.random.default_rng(106)
    radii = (0.0, 0.05, 0.1, 0.5, 1.5)
    mono_ok = dom_ok = True
    worst_mono = worst_dom = 0.0
    for _ in range(20):
        g = random_game(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)),
                        int(rng.integers(1, 4)))
        nu = ds.Distribution.uniform(g.nominal_utilities())
        bay = bayesian_mip(g, nu).value
        values = [ds.solve_wasserstein_finite_mip(g, ds.WassersteinBall(nu, r)).value
                  for r in radii]
        for hi, lo in zip(values, values[1:]):
            worst_mono = max(worst_mono, lo - hi)
            mono_ok &= lo <= hi + 1e-6
        for v in values:
            worst_dom = max(worst_dom, v - bay)
            dom_ok &= bay >= v - 1e-6
    ok = mono_ok and dom_ok
    report(6, ok, f"20 instances x 5 radii; max monotonicity slack {worst_mono:.2e}, "
                  f"max dominance slack {worst_dom:.2e} (tol 1e-6)")
    assert ok


def test_criterion_7_runtime_trends():
    """Mean incremental runtime rises with follower actions and nominal count."""
    q_cfg = ExperimentConfig(family="inspection", method="dr_algorithm1",
                             sweep_var="q", sweep_values=[1, 2, 3],
                             family_params={"s": 5, "p": 1, "k": 2},
                             repetitions=5, time_limit=120.0, seed=7)
    k_cfg = ExperimentConfig(family="inspection", method="dr_algorithm1",
                             sweep_var="k", sweep_values=[1, 2, 3, 4],
                             family_params={"s": 5, "p": 1, "q": 2},
                             repetitions=5, time_limit=120.0, seed=8)
    t0 = time.perf_counter()
    q_stats = summarize(run_sweep(q_cfg))
    k_stats = summarize(run_sweep(k_cfg))
    elapsed = time.perf_counter() - t0
    q_rho = spearmanr([s["sweep_value"] for s in q_stats],
                      [s["time_mean"] for s in q_stats]).statistic
    k_rho = spearmanr([s["sweep_value"] for s in k_stats],
                      [s["time_mean"] for s in k_stats]).statistic
    ok = q_rho >= 0.8 and k_rho >= 0.8
    report(7, ok, f"rank correlation q-sweep {q_rho:.2f}, k-sweep {k_rho:.2f} "
                  f"(need >= 0.8), {elapsed:.0f}s")
    assert ok


def test_criterion_8_mip_size():
    """The direct ball MIP has exactly n+k+1 continuous and m*k binary vars."""
    rng = np.random.default_rng(108)
    ok = True
    for _ in range(10):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(2, 7))
        k = int(rng.integers(1, 5))
        g = random_game(rng, n, m, k)
        prog, meta = build_wasserstein_finite_mip(g, uniform_ball(g, 0.1))
        n_bin = int(prog.binary.sum())
        n_cont = prog.n_vars - n_bin
        ok &= n_cont == n + k + 1 and n_bin == m * k
    report(8, ok, "10 random sizes: continuous = n+k+1, binaries = m*k")
    assert ok


def test_criterion_9_oracle_cross_validation():
    """Family-specialized and restricted-box separation agree within 1e-5."""
    rng = np.random.default_rng(109)
    worst = 0.0
    calls = 0
    for seed in (1, 2):
        g = ds.gen_inspection(ds.InspectionParams(3, 1, 1, k=2, seed=seed))
        family = g.universe
        hit_cells = [tuple(c) for c in np.argwhere(family.mask)]
        miss_cells = [tuple(c) for c in np.argwhere(~family.mask)]
        box = BoxFrobeniusOracle(equal_groups=[hit_cells, miss_cells])
        insp = InspectionOracle()
        ball = uniform_ball(g, 0.1)
        for _ in range(10):
            x = rng.dirichlet(np.ones(g.n))
            lam = float(rng.uniform(0.0, 5.0))
            j = int(rng.integers(ball.k))
            state = MasterState.initial(g, ball)
            state.x, state.lam, state.w = x, lam, np.zeros(ball.k)
            a = separate(insp, state, g, ball, j)
            b = box.inner_min(g, x, lam, ball.nominal.support[j], 1e-6)
            worst = max(worst, abs(a.gamma - b.gamma))
            calls += 1
    ok = worst <= 1e-5
    report(9, ok, f"{calls} separation calls, max gap {worst:.2e} (tol 1e-5)")
    assert ok
