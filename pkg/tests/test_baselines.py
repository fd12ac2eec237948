"""Per-mapping LP baseline and the non-robust Bayesian MIP."""

import numpy as np
import pytest

import drstack as ds
from drstack.baselines import bayesian_mip, enumeration_lp_baseline
from drstack.finite import EnumerationGuardError
from drstack.incremental import AlgorithmConfig, FiniteSetOracle

import oracles


def random_game(rng, n, m, k):
    return ds.GameInstance(rng.uniform(size=(n, m)),
                           ds.FiniteUniverse([rng.uniform(size=(n, m)) for _ in range(k)]))


def uniform_ball(game, radius, t=2.0):
    return ds.WassersteinBall(ds.Distribution.uniform(game.nominal_utilities()),
                              radius, t)


class TestEnumerationLpBaseline:
    def test_k1_is_classical_sse(self):
        rng = np.random.default_rng(50)
        for _ in range(5):
            g = random_game(rng, 3, 3, 1)
            # one utility and radius zero: the worst case cannot move
            sol = enumeration_lp_baseline(g, uniform_ball(g, 0.0))
            expected = oracles.sse_multiple_lp(g.u_l, g.universe.utilities[0])
            assert sol.value == pytest.approx(expected, abs=1e-6)

    def test_matches_direct_mip(self):
        rng = np.random.default_rng(51)
        for _ in range(8):
            g = random_game(rng, 2, 2, 2)
            ball = uniform_ball(g, float(rng.uniform(0.0, 0.5)))
            a = enumeration_lp_baseline(g, ball)
            b = ds.solve_wasserstein_finite_mip(g, ball)
            assert a.value == pytest.approx(b.value, abs=1e-5)

    def test_zero_radius_matches_bayesian(self):
        rng = np.random.default_rng(52)
        g = random_game(rng, 3, 2, 2)
        ball = uniform_ball(g, 0.0)
        assert enumeration_lp_baseline(g, ball).value == pytest.approx(
            bayesian_mip(g, ball.nominal).value, abs=1e-6)

    def test_guard(self):
        rng = np.random.default_rng(53)
        g = random_game(rng, 2, 11, 5)
        with pytest.raises(EnumerationGuardError):
            enumeration_lp_baseline(g, uniform_ball(g, 0.1))


class TestBayesianMip:
    def test_k1_is_sse(self):
        rng = np.random.default_rng(54)
        for _ in range(5):
            g = random_game(rng, 2, 3, 1)
            sol = bayesian_mip(g, ds.Distribution.uniform(g.nominal_utilities()))
            expected = oracles.sse_multiple_lp(g.u_l, g.universe.utilities[0])
            assert sol.value == pytest.approx(expected, abs=1e-6)

    def test_degenerate_weights_ignore_unweighted_type(self):
        rng = np.random.default_rng(55)
        u_l = rng.uniform(size=(2, 2))
        u1 = rng.uniform(size=(2, 2))
        for u2 in (rng.uniform(size=(2, 2)), rng.uniform(size=(2, 2))):
            g = ds.GameInstance(u_l, ds.FiniteUniverse([u1, u2]))
            nu = ds.Distribution([u1, u2], [1.0, 0.0])
            got = bayesian_mip(g, nu).value
            solo = ds.GameInstance(u_l, ds.FiniteUniverse([u1]))
            expected = bayesian_mip(solo, ds.Distribution.point_mass(u1)).value
            assert got == pytest.approx(expected, abs=1e-6)

    def test_dominates_robust_value(self):
        rng = np.random.default_rng(56)
        for _ in range(50):
            g = random_game(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)),
                            int(rng.integers(1, 3)))
            nu = ds.Distribution.uniform(g.nominal_utilities())
            theta = float(rng.uniform(0.0, 1.0))
            bay = bayesian_mip(g, nu).value
            rob = ds.solve_wasserstein_finite_mip(g, ds.WassersteinBall(nu, theta)).value
            assert bay >= rob - 1e-6


class TestThreeWayAgreement:
    def test_enum_lp_direct_mip_and_incremental(self):
        rng = np.random.default_rng(57)
        for _ in range(6):
            n, m, k = int(rng.integers(2, 4)), int(rng.integers(2, 4)), int(rng.integers(1, 3))
            g = random_game(rng, n, m, k)
            ball = uniform_ball(g, float(rng.uniform(0.0, 0.4)))
            v_lp = enumeration_lp_baseline(g, ball).value
            v_mip = ds.solve_wasserstein_finite_mip(g, ball).value
            alg = ds.run_algorithm1(g, ball, FiniteSetOracle(ball.metric, ball.exponent),
                                    AlgorithmConfig())
            assert alg.diagnostics["converged"]
            assert v_lp == pytest.approx(v_mip, abs=1e-5)
            assert alg.value == pytest.approx(v_mip, abs=1e-5)
