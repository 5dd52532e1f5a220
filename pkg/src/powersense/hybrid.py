"""Hybrid game: each player picks (sense or not, transmit power) at once.

Powers are chosen simultaneously, so sensing brings no information here;
it only costs the ``(1 - alpha)`` rate factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlated import lambda_mixture
from .efficiency import EfficiencyModel
from .exceptions import ConfigError, InfeasibleError
from .finite_game import FiniteGame, enumerate_pure_equilibria
from .hierarchy import NOT_SENSE, SENSE
from .oneshot import NetworkConfig, nash_powers
from .two_player import THREE, build_matrix, classify_equilibria

SENSES = (NOT_SENSE, SENSE)


def power_grid(size, p_min, p_max, include=()):
    """Geometric grid on ``[p_min, p_max]``; each ``include`` value replaces its nearest point."""
    if size < 2:
        raise ConfigError("grid_size must be >= 2")
    if not 0 < p_min < p_max:
        raise ConfigError("need 0 < p_min < p_max")
    grid = np.geomspace(p_min, p_max, int(size))
    taken = set()
    for p in sorted(set(float(x) for x in include)):
        if not p_min <= p <= p_max:
            continue
        order = np.argsort(np.abs(np.log(grid) - np.log(p)))
        k = next(int(k) for k in order if int(k) not in taken)
        grid[k] = p
        taken.add(k)
    return np.sort(grid)


@dataclass
class HybridGame:
    """Finite game over ``{NS, S} x grid`` per player; action index ``sense * n + power``."""

    game: FiniteGame
    grid: np.ndarray
    alpha: float

    @property
    def n_powers(self):
        return self.grid.size

    def action(self, sense, power_index):
        return SENSES.index(sense) * self.n_powers + power_index

    def decode(self, a):
        return SENSES[a // self.n_powers], float(self.grid[a % self.n_powers])

    def index_of_power(self, p):
        k = int(np.argmin(np.abs(self.grid - p)))
        if not np.isclose(self.grid[k], p, rtol=1e-12, atol=0):
            raise ConfigError(f"power {p} is not on the grid")
        return k


def build_hybrid_game(cfg: NetworkConfig, model: EfficiencyModel, grid_size=101, alpha=None,
                      p_min=None, p_max=None, include_nash=True, extra_powers=()) -> HybridGame:
    """Payoff ``(1 - alpha 1[sense_i]) R_i f(SINR_i) / p_i`` on a shared power grid.

    The grid defaults to ``[p*/100, 3 p*]`` around the largest Nash power and
    contains the Nash powers themselves when ``include_nash`` is set.
    """
    if cfg.K != 2:
        raise ConfigError("the hybrid game is defined for K = 2")
    alpha = cfg.alpha if alpha is None else float(alpha)
    include = list(extra_powers)
    try:
        p_star = nash_powers(cfg, model)
    except InfeasibleError:
        p_star = None
    if include_nash and p_star is not None:
        include = list(p_star) + include
    ref = float(np.max(p_star)) if p_star is not None else float(np.min(cfg.Pmax))
    p_min = ref / 100 if p_min is None else p_min
    p_max = min(3 * ref, float(np.min(cfg.Pmax))) if p_max is None else p_max
    grid = power_grid(grid_size, p_min, p_max, include)

    n = grid.size
    P1, P2 = np.meshgrid(grid, grid, indexing="ij")
    sinr1 = P1 * cfg.h[0] / (P2 * cfg.h[1] + cfg.sigma2)
    sinr2 = P2 * cfg.h[1] / (P1 * cfg.h[0] + cfg.sigma2)
    base1 = cfg.R[0] * model.f(sinr1) / P1
    base2 = cfg.R[1] * model.f(sinr2) / P2
    penalty = np.array([1.0, 1.0 - alpha])
    payoffs = np.empty((2 * n, 2 * n, 2))
    for s1 in range(2):
        for s2 in range(2):
            block = (slice(s1 * n, (s1 + 1) * n), slice(s2 * n, (s2 + 1) * n))
            payoffs[block + (0,)] = penalty[s1] * base1
            payoffs[block + (1,)] = penalty[s2] * base2
    labels = [f"{s}@{p:.6e}" for s in SENSES for p in grid]
    return HybridGame(FiniteGame(payoffs, [labels, list(labels)]), grid, alpha)


@dataclass
class DominanceReport:
    strict: bool
    weak: bool
    min_margin: float
    max_identity_error: float

    def to_dict(self):
        return dict(strict=self.strict, weak=self.weak, min_margin=self.min_margin,
                    max_identity_error=self.max_identity_error)


def dominance_check(hg: HybridGame) -> DominanceReport:
    """Compare every ``(S, p)`` with its same-power twin ``(NS, p)`` against all opponent actions.

    ``max_identity_error`` measures ``margin - alpha * U(NS, p)`` over the tensor.
    """
    n = hg.n_powers
    P = hg.game.payoffs
    margins, errors = [], []
    for i in range(2):
        u = np.moveaxis(P[..., i], i, 0)
        ns, s = u[:n], u[n:]
        m = ns - s
        margins.append(m.min())
        errors.append(np.abs(m - hg.alpha * ns).max())
    min_margin = float(min(margins))
    return DominanceReport(min_margin > 0, min_margin >= 0, min_margin, float(max(errors)))


def hybrid_equilibria(hg: HybridGame, tol=1e-12):
    """Pure equilibria as ``((sense_1, p_1), (sense_2, p_2))`` by exhaustive deviation check."""
    return [tuple(hg.decode(a) for a in s) for s in enumerate_pure_equilibria(hg.game, tol)]


def reduced_equilibria(hg: HybridGame, tol=1e-12):
    """Equilibria after deleting the dominated sensing actions first."""
    n = hg.n_powers
    sub = FiniteGame(hg.game.payoffs[:n, :n], [a[:n] for a in hg.game.actions])
    return [tuple(hg.decode(a) for a in s) for s in enumerate_pure_equilibria(sub, tol)]


def _verdict(candidate, reference, tol=1e-9):
    c, r = np.asarray(candidate), np.asarray(reference)
    atol = tol * max(1.0, float(np.abs(r).max()))
    if np.all(np.abs(c - r) <= atol):
        return "coincide"
    if np.all(c >= r - atol) and np.any(c > r + atol):
        return "pareto-dominates"
    if np.all(r >= c - atol) and np.any(r > c + atol):
        return "pareto-dominated"
    return "incomparable"


def paradox_report(cfg: NetworkConfig, model: EfficiencyModel, alpha=None, grid_size=101, lam=0.5) -> dict:
    """Hybrid-game equilibrium utilities against the sense-first-then-power outcomes."""
    alpha = cfg.alpha if alpha is None else float(alpha)
    hg = build_hybrid_game(cfg, model, grid_size, alpha)
    dominance = dominance_check(hg)
    equilibria = hybrid_equilibria(hg)
    hybrid_utils = []
    for (s1, p1), (s2, p2) in equilibria:
        a = (hg.action(s1, hg.index_of_power(p1)), hg.action(s2, hg.index_of_power(p2)))
        hybrid_utils.append(hg.game.payoffs[a].tolist())
    p_star = nash_powers(cfg, model)
    steps = np.diff(hg.grid)

    matrix = build_matrix(cfg, model, alpha)
    report = classify_equilibria(matrix, model=model)
    outcomes = []
    for s in report.pure:
        outcomes.append({"label": f"{SENSES[s[0]]},{SENSES[s[1]]}", "utilities": matrix.payoffs[s].tolist()})
    if report.classification == THREE:
        mix = lambda_mixture(matrix, lam)
        outcomes.append({"label": f"lambda={lam:g}", "utilities": mix.utilities.tolist()})
        outcomes.append({"label": "mixed", "utilities": report.mixed.values.tolist()})
    if hybrid_utils:
        gaps = [abs(p1 - p_star[0]) + abs(p2 - p_star[1]) for (_, p1), (_, p2) in equilibria]
        reference = hybrid_utils[int(np.argmin(gaps))]
    else:
        reference = [float("nan")] * 2
    for o in outcomes:
        o["verdict"] = _verdict(o["utilities"], reference)
    return {
        "alpha": alpha,
        "classification": report.classification,
        "hybrid": {
            "equilibria": [
                {"player1": {"sense": s1, "power": p1}, "player2": {"sense": s2, "power": p2}, "utilities": u}
                for ((s1, p1), (s2, p2)), u in zip(equilibria, hybrid_utils)
            ],
            "nash_powers": p_star.tolist(),
            "grid": {"size": int(hg.n_powers), "min": float(hg.grid[0]), "max": float(hg.grid[-1]),
                     "max_step": float(steps.max())},
            "dominance": dominance.to_dict(),
        },
        "reference_utilities": reference,
        "two_stage": outcomes,
    }
