"""Finite K-player games stored as dense payoff tensors.

``payoffs[a_1, ..., a_K, i]`` is player ``i``'s utility at the joint action
``(a_1, ..., a_K)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, GameSizeError

MAX_ENUM_PLAYERS = 20


@dataclass
class FiniteGame:
    payoffs: np.ndarray
    actions: list

    def __post_init__(self):
        self.payoffs = np.asarray(self.payoffs, dtype=float)
        K = self.payoffs.ndim - 1
        if K < 1 or self.payoffs.shape[-1] != K:
            raise ConfigError("payoff tensor must have shape (n_1, ..., n_K, K)")
        if len(self.actions) != K:
            raise ConfigError("one action list per player required")
        self.actions = [list(a) for a in self.actions]
        for i, acts in enumerate(self.actions):
            if len(acts) != self.payoffs.shape[i]:
                raise ConfigError(f"player {i} has {len(acts)} labels but {self.payoffs.shape[i]} payoff slices")
        if not np.all(np.isfinite(self.payoffs)):
            raise ConfigError("payoffs must be finite")

    @property
    def K(self):
        return self.payoffs.ndim - 1

    @property
    def shape(self):
        return self.payoffs.shape[:-1]

    def utility(self, i):
        return self.payoffs[..., i]

    def joint_actions(self):
        return itertools.product(*(range(n) for n in self.shape))

    def labels(self, joint):
        return tuple(self.actions[i][a] for i, a in enumerate(joint))

    def scaled(self, weights):
        """Game with player ``i``'s payoffs divided by ``weights[i]``."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.K,) or np.any(w <= 0):
            raise ConfigError("weights must be positive, one per player")
        return FiniteGame(self.payoffs / w, self.actions)

    def to_dict(self):
        return {
            "players": self.K,
            "actions": [[str(a) for a in acts] for acts in self.actions],
            "payoffs": [
                {"profile": [str(x) for x in self.labels(s)], "utilities": self.payoffs[s].tolist()}
                for s in self.joint_actions()
            ],
        }

    @classmethod
    def from_dict(cls, data):
        actions = data["actions"]
        index = [{str(a): k for k, a in enumerate(acts)} for acts in actions]
        K = len(actions)
        payoffs = np.full(tuple(len(a) for a in actions) + (K,), np.nan)
        for entry in data["payoffs"]:
            s = tuple(index[i][a] for i, a in enumerate(entry["profile"]))
            payoffs[s] = entry["utilities"]
        if np.isnan(payoffs).any():
            raise ConfigError("payoff table does not cover every joint action")
        return cls(payoffs, actions)


def _scale(game):
    return max(1.0, float(np.max(np.abs(game.payoffs))))


def deviation_gains(game: FiniteGame) -> np.ndarray:
    """Best unilateral gain ``max_b u_i(b, s_-i) - u_i(s)`` per joint action and player."""
    gains = np.empty_like(game.payoffs)
    for i in range(game.K):
        u = game.utility(i)
        gains[..., i] = u.max(axis=i, keepdims=True) - u
    return gains


def enumerate_pure_equilibria(game: FiniteGame, tol=1e-12) -> list[tuple]:
    """All joint actions at which no player gains more than ``tol`` by deviating."""
    if game.K > MAX_ENUM_PLAYERS:
        raise GameSizeError(f"enumeration limited to {MAX_ENUM_PLAYERS} players, game has {game.K}")
    stable = np.all(deviation_gains(game) <= tol, axis=-1)
    return [tuple(int(a) for a in s) for s in np.argwhere(stable)]


def check_exact_potential(game: FiniteGame, tol=1e-9):
    """Four-cycle test for an exact potential.

    For every player pair ``(i, j)``, action pairs ``s_i != t_i``,
    ``s_j != t_j`` and opponent context, the utility change around the
    rectangle must vanish.  ``tol`` is relative to ``max(1, max |u|)``.
    Returns ``(True, None)`` or ``(False, witness)``.
    """
    atol = tol * _scale(game)
    worst = None
    for i, j in itertools.combinations(range(game.K), 2):
        ui = np.moveaxis(game.utility(i), (i, j), (0, 1))
        uj = np.moveaxis(game.utility(j), (i, j), (0, 1))
        ni, nj = ui.shape[:2]
        for si, ti in itertools.combinations(range(ni), 2):
            for sj, tj in itertools.combinations(range(nj), 2):
                cycle = (
                    ui[ti, sj] - ui[si, sj] + ui[si, tj] - ui[ti, tj]
                    + uj[ti, tj] - uj[ti, sj] + uj[si, sj] - uj[si, tj]
                )
                k = int(np.argmax(np.abs(cycle)))
                value = float(np.abs(cycle).flat[k])
                if value > atol and (worst is None or value > worst["violation"]):
                    worst = {
                        "players": (i, j),
                        "actions_i": (si, ti),
                        "actions_j": (sj, tj),
                        "context_index": k,
                        "cycle_sum": float(cycle.flat[k]),
                        "violation": value,
                    }
    return worst is None, worst


def integrate_potential(game: FiniteGame, anchor=None, order=None) -> np.ndarray:
    """Potential obtained by summing utility changes along a path from ``anchor``.

    The path switches players to their target actions one at a time in
    ``order``.  Only meaningful when the game is an exact potential game.
    """
    anchor = tuple([0] * game.K) if anchor is None else tuple(anchor)
    order = list(range(game.K)) if order is None else list(order)
    if sorted(order) != list(range(game.K)):
        raise ConfigError("order must be a permutation of the players")
    V = np.empty(game.shape)
    for s in game.joint_actions():
        current = list(anchor)
        total = 0.0
        for i in order:
            if current[i] != s[i]:
                before = game.payoffs[tuple(current) + (i,)]
                current[i] = s[i]
                total += game.payoffs[tuple(current) + (i,)] - before
        V[s] = total
    return V


def potential_residual(game: FiniteGame, V, weights=None) -> float:
    """Largest violation of ``U_i(s) - U_i(t) = w_i (V(s) - V(t))`` over unilateral deviations."""
    w = np.ones(game.K) if weights is None else np.asarray(weights, dtype=float)
    worst = 0.0
    for i in range(game.K):
        d = game.utility(i) - w[i] * V
        spread = d.max(axis=i) - d.min(axis=i)
        worst = max(worst, float(spread.max()))
    return worst


@dataclass
class WeightedPotentialResult:
    is_potential: bool
    potential: np.ndarray | None
    residual: float | None
    witness: dict | None

    def __iter__(self):
        return iter((self.is_potential, self.potential))


def check_weighted_potential(game: FiniteGame, weights, tol=1e-9) -> WeightedPotentialResult:
    """Weighted-potential test through the ``1/w_i``-normalised game.

    On success the potential is anchored at joint action ``0`` (value 0) and
    verified on all unilateral deviations of the original game.
    """
    w = np.asarray(weights, dtype=float)
    normalised = game.scaled(w)
    ok, witness = check_exact_potential(normalised, tol)
    if not ok:
        return WeightedPotentialResult(False, None, None, witness)
    V = integrate_potential(normalised)
    residual = potential_residual(game, V, w)
    if residual > tol * _scale(game):
        return WeightedPotentialResult(False, V, residual, {"reason": "potential reconstruction failed"})
    return WeightedPotentialResult(True, V, residual, None)
