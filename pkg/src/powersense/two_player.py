"""Two-player sensing matrix game.

Row/column order is ``NS`` first, ``S`` second.  Mixed strategies are
reported through ``q_i``: the probability player ``i`` plays ``NS``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .efficiency import EfficiencyModel, solve_beta, solve_gamma
from .exceptions import ConfigError, NoInteriorSolutionError
from .finite_game import FiniteGame
from .hierarchy import NOT_SENSE, SENSE
from .oneshot import NetworkConfig

ACTIONS = (NOT_SENSE, SENSE)
THREE = "THREE"
UNIQUE = "UNIQUE"
CONTINUUM = "CONTINUUM"
BOUNDARY_BAND = 1e-9


@dataclass
class SensingMatrix2x2:
    """Payoffs ``payoffs[a1, a2, player]`` plus the scalars that generated them."""

    payoffs: np.ndarray
    beta: float
    gamma: float
    alpha: float
    weights: np.ndarray

    def game(self) -> FiniteGame:
        return FiniteGame(self.payoffs, [list(ACTIONS), list(ACTIONS)])

    def entry(self, a1, a2):
        return tuple(self.payoffs[ACTIONS.index(a1), ACTIONS.index(a2)])

    def to_dict(self):
        return {
            f"{a1},{a2}": self.payoffs[i, j].tolist()
            for i, a1 in enumerate(ACTIONS)
            for j, a2 in enumerate(ACTIONS)
        }


def unit_entries(f, beta, gamma, alpha):
    """Per-weight Nash, leader and follower payoffs of the matrix game."""
    nash = f(beta) * (1 - beta) / beta
    lead = f(gamma) * (1 - gamma * beta) / (gamma * (1 + beta))
    follow = (1 - alpha) * f(beta) * (1 - gamma * beta) / (beta * (1 + gamma))
    return nash, lead, follow


def build_matrix(cfg: NetworkConfig, model: EfficiencyModel, alpha=None) -> SensingMatrix2x2:
    if cfg.K != 2:
        raise ConfigError("the matrix game is defined for K = 2")
    alpha = cfg.alpha if alpha is None else float(alpha)
    if not 0 <= alpha < 1:
        raise ConfigError("alpha must lie in [0, 1)")
    beta = solve_beta(model).value
    gamma = solve_gamma(model, 2).value
    f = lambda x: float(model.f(x))
    nash, lead, follow = unit_entries(f, beta, gamma, alpha)
    w = cfg.weights
    unit = np.array(
        [
            [[nash, nash], [lead, follow]],
            [[follow, lead], [(1 - alpha) * nash, (1 - alpha) * nash]],
        ]
    )
    return SensingMatrix2x2(unit * w, beta, gamma, alpha, w)


def alpha_threshold_three_eq(model: EfficiencyModel) -> float:
    beta = solve_beta(model).value
    gamma = solve_gamma(model, 2).value
    return (beta - gamma) / (1 - beta * gamma)


def alpha_threshold_follow_vs_lead(model: EfficiencyModel) -> float:
    beta = solve_beta(model).value
    gamma = solve_gamma(model, 2).value
    fb, fg = float(model.f(beta)), float(model.f(gamma))
    return (fb - fg + fb / beta - fg / gamma) / (fb * (1 + beta) / beta)


@dataclass
class MixedProfile:
    q1: float
    q2: float
    values: np.ndarray

    def to_dict(self):
        return {
            "player1": {NOT_SENSE: self.q1, SENSE: 1 - self.q1},
            "player2": {NOT_SENSE: self.q2, SENSE: 1 - self.q2},
            "utilities": self.values.tolist(),
        }


@dataclass
class EquilibriumReport:
    classification: str
    pure: list
    mixed: MixedProfile | None
    continua: list
    payoffs: np.ndarray
    thresholds: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "classification": self.classification,
            "entries": {
                f"{a1},{a2}": self.payoffs[i, j].tolist()
                for i, a1 in enumerate(ACTIONS)
                for j, a2 in enumerate(ACTIONS)
            },
            "pure_equilibria": [
                {"profile": [ACTIONS[a] for a in s], "utilities": self.payoffs[s].tolist()} for s in self.pure
            ],
            "mixed_equilibrium": None if self.mixed is None else self.mixed.to_dict(),
            "continua": self.continua,
            "thresholds": self.thresholds,
        }


def _diffs(payoffs):
    """Gain from NS over S: ``d1[a2]`` for player 1, ``d2[a1]`` for player 2."""
    d1 = payoffs[0, :, 0] - payoffs[1, :, 0]
    d2 = payoffs[:, 0, 1] - payoffs[:, 1, 1]
    return d1, d2


def _indifference_prob(d):
    """Probability on the opponent's NS making ``q d[0] + (1-q) d[1] = 0``; None if degenerate."""
    denom = d[0] - d[1]
    if denom == 0:
        return None
    return d[1] / (d[1] - d[0])


def mixed_equilibrium(matrix, tol=BOUNDARY_BAND) -> MixedProfile:
    """Completely mixed equilibrium from the two indifference conditions."""
    payoffs = matrix.payoffs if isinstance(matrix, SensingMatrix2x2) else np.asarray(matrix, dtype=float)
    d1, d2 = _diffs(payoffs)
    q2 = _indifference_prob(d1)  # player 2's mix makes player 1 indifferent
    q1 = _indifference_prob(d2)
    if q1 is None or q2 is None or not (0 < q1 < 1 and 0 < q2 < 1):
        raise NoInteriorSolutionError(f"no interior indifference solution (q1={q1}, q2={q2})")
    p1 = np.array([q1, 1 - q1])
    p2 = np.array([q2, 1 - q2])
    values = np.array([p1 @ payoffs[:, :, k] @ p2 for k in range(2)])
    return MixedProfile(float(q1), float(q2), values)


def mixed_closed_form(model: EfficiencyModel, alpha: float):
    """Closed forms: common probability ``x* = y*`` and per-weight value ``Delta``."""
    beta = solve_beta(model).value
    gamma = solve_gamma(model, 2).value
    fb, fg = float(model.f(beta)), float(model.f(gamma))
    nash = fb / beta * (1 - beta)
    lead = fg / gamma * (1 - gamma * beta) / (1 + beta)
    follow = (1 - alpha) * fb / beta * (1 - gamma * beta) / (1 + gamma)
    denom = (1 - alpha) * nash - lead + nash - follow
    x = ((1 - alpha) * nash - lead) / denom
    delta = ((1 - alpha) * nash * nash - lead * follow) / denom
    return x, delta


def classify_equilibria(matrix, tol=BOUNDARY_BAND, model=None) -> EquilibriumReport:
    """Exhaustive equilibrium analysis of a 2x2 bimatrix game.

    Ties are decided with tolerance ``tol`` relative to the largest payoff.
    A tie that lets one player mix freely against a pure action of the other
    yields ``CONTINUUM``; otherwise the equilibrium count gives ``THREE`` or
    ``UNIQUE``.
    """
    payoffs = matrix.payoffs if isinstance(matrix, SensingMatrix2x2) else np.asarray(matrix, dtype=float)
    atol = tol * float(np.max(np.abs(payoffs)))
    d1, d2 = _diffs(payoffs)
    zero1 = np.abs(d1) <= atol
    zero2 = np.abs(d2) <= atol

    pure = []
    for a1 in range(2):
        for a2 in range(2):
            g1 = payoffs[1 - a1, a2, 0] - payoffs[a1, a2, 0]
            g2 = payoffs[a1, 1 - a2, 1] - payoffs[a1, a2, 1]
            if g1 <= atol and g2 <= atol:
                pure.append((a1, a2))

    continua = []
    # player 2 free on the edge where player 1 plays a1 purely
    for a1 in range(2):
        if zero2[a1]:
            sign = 1 if a1 == 0 else -1  # NS is a best reply when d1 >= 0
            support = [sign * d1[k] >= -atol for k in range(2)]
            if all(support) or any(sign * d1[k] > atol for k in range(2)):
                continua.append({"pure_player": 1, "action": ACTIONS[a1], "mixing_player": 2})
    for a2 in range(2):
        if zero1[a2]:
            sign = 1 if a2 == 0 else -1
            support = [sign * d2[k] >= -atol for k in range(2)]
            if all(support) or any(sign * d2[k] > atol for k in range(2)):
                continua.append({"pure_player": 2, "action": ACTIONS[a2], "mixing_player": 1})
    if zero1.all() or zero2.all():
        continua.append({"pure_player": None, "action": None, "mixing_player": "both"})

    mixed = None
    if not continua:
        try:
            mixed = mixed_equilibrium(payoffs)
        except NoInteriorSolutionError:
            mixed = None
        count = len(pure) + (mixed is not None)
        classification = THREE if count == 3 else UNIQUE if count == 1 else f"COUNT_{count}"
    else:
        classification = CONTINUUM

    thresholds = {}
    if model is not None:
        thresholds = {
            "three_equilibria": alpha_threshold_three_eq(model),
            "follow_vs_lead": alpha_threshold_follow_vs_lead(model),
        }
    return EquilibriumReport(classification, pure, mixed, continua, payoffs, thresholds)


def classify_by_threshold(alpha: float, threshold: float, band=BOUNDARY_BAND) -> str:
    if abs(alpha - threshold) <= band:
        return CONTINUUM
    return THREE if alpha < threshold else UNIQUE
