import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powersense.efficiency import (
    EfficiencyModel,
    epsilon_L,
    leader_equation,
    solve_beta,
    solve_gamma,
    solve_gamma_L,
    solve_leader_target,
)
from powersense.exceptions import ConfigError, InfeasibleKError, InfeasibleProfileError


def bisect(g, lo, hi, iters=200):
    """Plain bisection, kept independent of the library solver."""
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# 40-digit values of the Goodman root M x = e^x - 1
GOODMAN_ROOTS = {
    2: 1.256431208626169676982737616609216326916,
    3: 1.903813694440383484710140360827135127280,
    10: 3.614950427087530629681888723572661435177,
}


class TestModel:
    def test_exp_ratio_values(self):
        m = EfficiencyModel.exp_ratio(0.5)
        assert m.f(0.4) == pytest.approx(0.2865047968601901, rel=1e-15)
        np.testing.assert_allclose(m.f(np.array([0.5, 1.0])), np.exp([-1.0, -0.5]))

    @pytest.mark.parametrize("model", [EfficiencyModel.exp_ratio(0.7), EfficiencyModel.goodman(3)])
    def test_derivative_matches_central_difference(self, model):
        xs = np.geomspace(0.05, 20, 40)
        h = 1e-6 * xs
        fd = (model.f(xs + h) - model.f(xs - h)) / (2 * h)
        np.testing.assert_allclose(model.df(xs), fd, rtol=1e-6, atol=1e-9)

    def test_bad_parameters(self):
        with pytest.raises(ConfigError):
            EfficiencyModel.exp_ratio(-1)
        with pytest.raises(ConfigError):
            EfficiencyModel.goodman(1)
        with pytest.raises(ConfigError):
            EfficiencyModel.goodman(2.5)
        with pytest.raises(ConfigError):
            EfficiencyModel("linear", 1.0)


class TestBeta:
    def test_exp_ratio_closed_form(self, rng):
        for a in rng.uniform(0.05, 0.95, 50):
            r = solve_beta(EfficiencyModel.exp_ratio(a))
            assert abs(r.value - a) <= 1e-9
            assert abs(r.residual) <= 1e-10

    @pytest.mark.parametrize("M", sorted(GOODMAN_ROOTS))
    def test_goodman_against_high_precision(self, M):
        r = solve_beta(EfficiencyModel.goodman(M))
        assert r.value == pytest.approx(GOODMAN_ROOTS[M], rel=1e-12)

    def test_goodman_against_bisection(self):
        oracle = bisect(lambda x: 4 * x - math.expm1(x), 0.5, 10.0)
        assert solve_beta(EfficiencyModel.goodman(4)).value == pytest.approx(oracle, rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 50.0))
    def test_residual_small(self, a):
        model = EfficiencyModel.exp_ratio(a)
        r = solve_beta(model)
        assert abs(leader_equation(model, 0.0)(r.value)) <= 1e-10


class TestGamma:
    @pytest.mark.parametrize("a, expected", [(0.5, 0.4), (1.0, 0.5)])
    def test_two_player_examples(self, a, expected):
        assert solve_gamma(EfficiencyModel.exp_ratio(a), 2).value == pytest.approx(expected, abs=1e-12)

    def test_closed_form_random(self, rng):
        for a in rng.uniform(0.05, 0.95, 50):
            r = solve_gamma(EfficiencyModel.exp_ratio(a), 2)
            assert abs(r.value - a / (1 + a * a)) <= 1e-9
            assert abs(r.residual) <= 1e-10

    def test_sign_change_across_root(self, model):
        beta = solve_beta(model).value
        g = leader_equation(model, beta)
        x = solve_gamma(model, 2).value
        assert g(x * (1 - 1e-6)) * g(x * (1 + 1e-6)) < 0

    def test_goodman_against_bisection(self):
        model = EfficiencyModel.goodman(10)
        beta = solve_beta(model).value
        # M=10 has beta > 1, so the K=2 hierarchy coefficient is c = beta
        g = leader_equation(model, beta)
        oracle = bisect(g, 1e-3, 1 / beta)
        assert solve_gamma(model, 2).value == pytest.approx(oracle, rel=1e-10)

    def test_gamma_not_above_beta(self, rng):
        for _ in range(50):
            a = rng.uniform(0.05, 0.45)
            K = int(rng.integers(2, 4))
            model = EfficiencyModel.exp_ratio(a)
            assert solve_gamma(model, K).value <= solve_beta(model).value

    def test_infeasible_k(self, model):
        # 1 - (K-2) beta = 0 for K=4, beta=0.5
        with pytest.raises(InfeasibleKError) as exc:
            solve_gamma(model, 4)
        assert "beta" in exc.value.condition


class TestGammaL:
    def test_epsilon_formula(self):
        # (K+2-L) beta / (N^2 - N (K+1-L) beta) with K=2, N=10, L=1
        assert epsilon_L(0.5, 2, 10.0, 1) == pytest.approx(1.5 / 90.0, rel=1e-15)

    def test_zero_denominator_is_infeasible(self):
        with pytest.raises(InfeasibleProfileError):
            epsilon_L(0.5, 2, 1.0, 1)

    def test_root_matches_bisection(self, model):
        r = solve_gamma_L(model, 2, 10.0, 1)
        eps = r.epsilon
        oracle = bisect(leader_equation(model, eps), 1e-3, 1 / eps)
        assert r.value == pytest.approx(oracle, rel=1e-10)
        # closed form for e^{-a/x}: a / (1 + eps a)
        assert r.value == pytest.approx(0.5 / (1 + eps * 0.5), rel=1e-12)
        assert abs(r.residual) < 1e-10

    def test_small_epsilon_limit(self, model):
        assert abs(solve_leader_target(model, 1e-9).value - 0.5) < 1e-6

    def test_config_error_for_negative_coefficient(self, model):
        with pytest.raises(ConfigError):
            solve_leader_target(model, -0.1)

    def test_no_warning_on_unique_root(self, model):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            solve_gamma_L(model, 3, 12.0, 2)
