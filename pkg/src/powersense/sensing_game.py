"""The K-player sensing game and its Rosenthal potential.

Actions are ordered ``("NS", "S")`` for every player.  A sensing player sees
the profile ``(F, L)`` with ``F`` counting all sensing players including
itself; a non-sensing player sees ``L`` counting itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .efficiency import EfficiencyModel
from .exceptions import GameSizeError
from .finite_game import MAX_ENUM_PLAYERS, FiniteGame, enumerate_pure_equilibria
from .hierarchy import NOT_SENSE, SENSE, SensingProfile, unit_sensing_utility
from .oneshot import NetworkConfig

ACTIONS = (NOT_SENSE, SENSE)


def unit_profile_tables(model: EfficiencyModel, K: int, N: float, consistent_gamma_index=False):
    """Per-unit-weight utilities ``sense[F]`` (F=1..K) and ``stay[L]`` (L=1..K).

    Index 0 of both arrays is unused and set to NaN.
    """
    sense = np.full(K + 1, np.nan)
    stay = np.full(K + 1, np.nan)
    for F in range(1, K + 1):
        sense[F] = unit_sensing_utility(model, K, N, F, K - F, SENSE, consistent_gamma_index)
    for L in range(1, K + 1):
        stay[L] = unit_sensing_utility(model, K, N, K - L, L, NOT_SENSE, consistent_gamma_index)
    return sense, stay


def profile_of(joint) -> SensingProfile:
    F = sum(1 for a in joint if ACTIONS[a] == SENSE)
    return SensingProfile(F, len(joint) - F)


def build_sensing_game(cfg: NetworkConfig, model: EfficiencyModel, consistent_gamma_index=False) -> FiniteGame:
    if cfg.K > MAX_ENUM_PLAYERS:
        raise GameSizeError(f"sensing game tensor limited to {MAX_ENUM_PLAYERS} players")
    K = cfg.K
    sense, stay = unit_profile_tables(model, K, cfg.N, consistent_gamma_index)
    grid = np.indices((2,) * K)
    n_sense = grid.sum(axis=0)
    payoffs = np.empty((2,) * K + (K,))
    w = cfg.weights
    for i in range(K):
        plays_s = grid[i] == 1
        # n_sense >= 1 wherever plays_s, K - n_sense >= 1 elsewhere
        s_val = sense[np.where(plays_s, n_sense, 1)]
        ns_val = stay[np.where(plays_s, 1, K - n_sense)]
        payoffs[..., i] = w[i] * np.where(plays_s, s_val, ns_val)
    return FiniteGame(payoffs, [list(ACTIONS)] * K)


@dataclass
class PotentialTable:
    """Rosenthal potential indexed by the number of sensing players ``F``.

    ``normalised`` is True when the weights differ; ``phi`` is then computed
    on the ``1/w_i``-scaled utilities.
    """

    K: int
    phi: np.ndarray
    weights: np.ndarray
    normalised: bool

    def value(self, profile: SensingProfile):
        return float(self.phi[profile.F])

    def profiles(self):
        return [SensingProfile(F, self.K - F) for F in range(self.K + 1)]

    def to_dict(self):
        return {
            "normalised": self.normalised,
            "weights": self.weights.tolist(),
            "phi": [{"F": F, "L": self.K - F, "phi": float(self.phi[F])} for F in range(self.K + 1)],
        }


def rosenthal_from_tables(sense, stay, K, scale=1.0):
    """``Phi(F, L) = sum_{i<=F} U^S(i, K-i) + sum_{j<=L} U^NS(K-j, j)``."""
    phi = np.zeros(K + 1)
    for F in range(K + 1):
        L = K - F
        phi[F] = scale * (sense[1 : F + 1].sum() + stay[1 : L + 1].sum())
    return phi


def rosenthal_potential(cfg: NetworkConfig, model: EfficiencyModel, consistent_gamma_index=False) -> PotentialTable:
    w = cfg.weights
    equal = bool(np.allclose(w, w[0], rtol=1e-12, atol=0))
    sense, stay = unit_profile_tables(model, cfg.K, cfg.N, consistent_gamma_index)
    phi = rosenthal_from_tables(sense, stay, cfg.K, scale=float(w[0]) if equal else 1.0)
    return PotentialTable(cfg.K, phi, w, normalised=not equal)


def pure_equilibria_by_potential(cfg: NetworkConfig, model: EfficiencyModel, tol=1e-12, consistent_gamma_index=False):
    """Profiles maximising the Rosenthal potential (ties within ``tol`` relative)."""
    table = rosenthal_potential(cfg, model, consistent_gamma_index)
    phi = table.phi
    cut = phi.max() - tol * max(1.0, float(np.abs(phi).max()))
    return {SensingProfile(F, cfg.K - F) for F in np.flatnonzero(phi >= cut)}


def equilibrium_profiles(game: FiniteGame, tol=1e-12):
    """Profiles ``(F, L)`` reached by the brute-force pure equilibria of ``game``."""
    return {profile_of(s) for s in enumerate_pure_equilibria(game, tol)}
