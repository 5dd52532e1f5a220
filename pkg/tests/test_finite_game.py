import numpy as np
import pytest

from powersense.exceptions import ConfigError, GameSizeError
from powersense.finite_game import (
    FiniteGame,
    check_exact_potential,
    check_weighted_potential,
    deviation_gains,
    enumerate_pure_equilibria,
    integrate_potential,
    potential_residual,
)


def bimatrix(a, b):
    return FiniteGame(np.stack([np.asarray(a, float), np.asarray(b, float)], axis=-1),
                      [list(range(len(a))), list(range(len(a[0])))])


MATCHING_PENNIES = bimatrix([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
COORDINATION = bimatrix([[2, 0], [0, 1]], [[2, 0], [0, 1]])


class TestFiniteGame:
    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            FiniteGame(np.zeros((2, 2, 3)), [[0, 1], [0, 1]])
        with pytest.raises(ConfigError):
            FiniteGame(np.zeros((2, 2, 2)), [[0, 1], [0, 1, 2]])
        with pytest.raises(ConfigError):
            FiniteGame(np.full((2, 2, 2), np.inf), [[0, 1], [0, 1]])

    def test_dict_round_trip(self, rng):
        g = FiniteGame(rng.normal(size=(2, 3, 2, 3)), [["a", "b"], ["x", "y", "z"], ["p", "q"]])
        back = FiniteGame.from_dict(g.to_dict())
        np.testing.assert_array_equal(back.payoffs, g.payoffs)
        assert back.actions == g.actions

    def test_incomplete_dict_rejected(self):
        d = COORDINATION.to_dict()
        d["payoffs"] = d["payoffs"][:-1]
        with pytest.raises(ConfigError):
            FiniteGame.from_dict(d)

    def test_scaled(self):
        g = COORDINATION.scaled([2.0, 0.5])
        np.testing.assert_allclose(g.utility(0), COORDINATION.utility(0) / 2)
        np.testing.assert_allclose(g.utility(1), COORDINATION.utility(1) * 2)
        with pytest.raises(ConfigError):
            COORDINATION.scaled([1.0, 0.0])


class TestEquilibria:
    def test_matching_pennies(self):
        assert enumerate_pure_equilibria(MATCHING_PENNIES) == []

    def test_coordination(self):
        assert enumerate_pure_equilibria(COORDINATION) == [(0, 0), (1, 1)]

    def test_prisoners_dilemma(self):
        g = bimatrix([[3, 0], [5, 1]], [[3, 5], [0, 1]])
        assert enumerate_pure_equilibria(g) == [(1, 1)]
        np.testing.assert_allclose(deviation_gains(g)[0, 0], [2, 2])

    def test_ties_count_as_equilibria(self):
        g = bimatrix([[1, 1], [1, 1]], [[1, 1], [1, 1]])
        assert len(enumerate_pure_equilibria(g)) == 4

    def test_size_guard(self):
        class Big:
            K = 21
        with pytest.raises(GameSizeError):
            enumerate_pure_equilibria(Big())

    def test_rescaling_keeps_equilibria(self, rng):
        for _ in range(20):
            g = FiniteGame(rng.integers(0, 4, size=(2, 3, 2, 3)).astype(float), [[0, 1], [0, 1, 2], [0, 1]])
            c = rng.uniform(0.1, 10, 3)
            assert enumerate_pure_equilibria(g.scaled(c)) == enumerate_pure_equilibria(g)

    def test_against_naive_loop(self, rng):
        g = FiniteGame(rng.integers(0, 3, size=(3, 2, 2, 3)).astype(float), [[0, 1, 2], [0, 1], [0, 1]])
        naive = []
        for s in g.joint_actions():
            stable = True
            for i in range(3):
                for b in range(g.shape[i]):
                    t = list(s)
                    t[i] = b
                    if g.payoffs[tuple(t) + (i,)] > g.payoffs[s + (i,)]:
                        stable = False
            if stable:
                naive.append(s)
        assert enumerate_pure_equilibria(g) == naive


def random_potential_game(rng, shape):
    """Identical-interest part plus per-player dummy terms: an exact potential game."""
    K = len(shape)
    V = rng.normal(size=shape)
    payoffs = np.empty(shape + (K,))
    for i in range(K):
        dummy_shape = list(shape)
        dummy_shape[i] = 1
        payoffs[..., i] = V + rng.normal(size=dummy_shape)
    return FiniteGame(payoffs, [list(range(n)) for n in shape]), V


class TestPotential:
    def test_one_player_game(self):
        g = FiniteGame(np.array([[1.0], [3.0]]), [["a", "b"]])
        assert check_exact_potential(g) == (True, None)

    def test_matching_pennies_fails_with_witness(self):
        ok, witness = check_exact_potential(MATCHING_PENNIES)
        assert not ok
        assert witness["players"] == (0, 1)
        assert abs(witness["cycle_sum"]) == pytest.approx(8.0)

    def test_constructed_potential_game(self, rng):
        for shape in [(2, 2), (3, 2, 2), (2, 2, 2, 2)]:
            g, V = random_potential_game(rng, shape)
            assert check_exact_potential(g, 1e-9)[0]
            W = integrate_potential(g)
            np.testing.assert_allclose(W - W.flat[0], V - V.flat[0], atol=1e-12)
            assert potential_residual(g, W) < 1e-12

    def test_path_independence(self, rng):
        g, _ = random_potential_game(rng, (2, 3, 2))
        anchor = (1, 2, 0)
        W1 = integrate_potential(g)
        W2 = integrate_potential(g, anchor=anchor, order=[2, 0, 1])
        np.testing.assert_allclose(W1 - W1[anchor], W2, atol=1e-9)

    def test_bad_order(self):
        with pytest.raises(ConfigError):
            integrate_potential(COORDINATION, order=[0, 0])

    def test_weighted(self, rng):
        g, V = random_potential_game(rng, (2, 2, 3))
        w = np.array([0.5, 2.0, 7.0])
        weighted = FiniteGame(g.payoffs * w, g.actions)
        assert not check_exact_potential(weighted)[0]
        res = check_weighted_potential(weighted, w)
        assert res.is_potential
        assert res.residual < 1e-9
        ok, W = res
        assert ok and W.shape == (2, 2, 3)

    def test_unit_weights_reduce_to_exact_check(self):
        res = check_weighted_potential(COORDINATION, [1.0, 1.0])
        assert res.is_potential == check_exact_potential(COORDINATION)[0]
        res = check_weighted_potential(MATCHING_PENNIES, [1.0, 1.0])
        assert not res.is_potential and res.witness is not None
