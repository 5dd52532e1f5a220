"""Leader/follower closed forms and the sensing-profile utilities.

The profile utilities are evaluated verbatim, including the use of
``gamma*_{L+1}`` next to ``f(gamma*_L)`` in the non-sensing utility.  Passing
``consistent_gamma_index=True`` substitutes ``gamma*_L`` throughout that
expression instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .efficiency import (
    EfficiencyModel,
    solve_beta,
    solve_gamma,
    solve_gamma_L,
)
from .exceptions import ConfigError, InfeasibleError, InfeasibleProfileError
from .oneshot import NetworkConfig

LEADER = "L"
FOLLOWER = "F"
SENSE = "S"
NOT_SENSE = "NS"


@dataclass(frozen=True)
class StackelbergOutcome:
    """Equilibrium power and utility of one player in a given role."""

    player: int
    role: str
    power: float
    utility: float


def hierarchy_margin(beta: float, gamma: float, K: int) -> float:
    """Common numerator ``1 - (K-1) gamma beta - (K-2) beta``."""
    return 1.0 - (K - 1) * gamma * beta - (K - 2) * beta


def stackelberg_factors(beta, gamma, K):
    """Dimensionless ``(p_L, p_F, u_L, u_F)`` per unit ``sigma2/h`` resp. ``h/sigma2``.

    ``f`` factors and the sensing penalty are left out; with ``gamma = beta``
    the expressions reduce to the Nash ones.
    """
    m = hierarchy_margin(beta, gamma, K)
    if m <= 0:
        raise InfeasibleError(
            f"1 - (K-1) gamma* beta* - (K-2) beta* = {m:.6g} <= 0",
            condition="1 - (K-1)*gamma*beta* - (K-2)*beta* > 0",
        )
    p_lead = gamma * (1 + beta) / m
    p_follow = beta * (1 + gamma) / m
    return p_lead, p_follow, 1.0 / p_lead, 1.0 / p_follow


def stackelberg_outcome(cfg: NetworkConfig, model: EfficiencyModel, i: int, role: str, alpha=None) -> StackelbergOutcome:
    """Leader or follower power and utility of player ``i``.

    The follower utility carries the ``(1 - alpha)`` sensing penalty; ``alpha``
    defaults to ``cfg.alpha``.  Utilities include the rate ``R_i``.
    """
    if role not in (LEADER, FOLLOWER):
        raise ConfigError(f"role must be {LEADER!r} or {FOLLOWER!r}")
    if not 0 <= i < cfg.K:
        raise IndexError(f"player index {i} out of range for K={cfg.K}")
    if cfg.K < 2:
        raise ConfigError("a hierarchy needs K >= 2")
    alpha = cfg.alpha if alpha is None else alpha
    beta = solve_beta(model).value
    gamma = solve_gamma(model, cfg.K).value
    p_lead, p_follow, u_lead, u_follow = stackelberg_factors(beta, gamma, cfg.K)
    scale_p = cfg.sigma2 / cfg.h[i]
    scale_u = cfg.R[i] * cfg.h[i] / cfg.sigma2
    if role == LEADER:
        return StackelbergOutcome(i, role, scale_p * p_lead, scale_u * u_lead * float(model.f(gamma)))
    return StackelbergOutcome(i, role, scale_p * p_follow, (1 - alpha) * scale_u * u_follow * float(model.f(beta)))


@dataclass(frozen=True)
class SensingProfile:
    """``F`` sensing and ``L`` non-sensing players among the ``K`` usual players."""

    F: int
    L: int

    def __post_init__(self):
        if self.F < 0 or self.L < 0:
            raise ConfigError("F and L must be nonnegative")

    @property
    def K(self):
        return self.F + self.L


def _gamma_L(model, K, N, L):
    return solve_gamma_L(model, K, N, L).value


def sensing_bracket(beta, gamma_next, N, F, L):
    """``N^2 - N beta - [(N + beta) L + (F + 1) beta] gamma``."""
    return N * N - N * beta - ((N + beta) * L + (F + 1) * beta) * gamma_next


def unit_sensing_utility(
    model: EfficiencyModel, K: int, N: float, F: int, L: int, action: str, consistent_gamma_index=False
) -> float:
    """Profile utility per unit weight ``R_i h_i / sigma2``."""
    if F + L != K:
        raise ConfigError(f"profile (F={F}, L={L}) does not sum to K={K}")
    beta = solve_beta(model).value
    if action == SENSE:
        gamma_next = _gamma_L(model, K, N, L + 1)
        bracket = sensing_bracket(beta, gamma_next, N, F, L)
        value = float(model.f(beta)) / (N * beta * (N + gamma_next)) * bracket
    elif action == NOT_SENSE:
        gamma_own = _gamma_L(model, K, N, L)
        gamma_next = gamma_own if consistent_gamma_index else _gamma_L(model, K, N, L + 1)
        bracket = sensing_bracket(beta, gamma_next, N, F, L)
        value = float(model.f(gamma_own)) / (N * gamma_next * (N + beta)) * bracket
    else:
        raise ConfigError(f"action must be {SENSE!r} or {NOT_SENSE!r}")
    if bracket <= 0:
        raise InfeasibleProfileError(
            f"sensing bracket {bracket:.6g} <= 0 at (F={F}, L={L}, N={N:g})",
            condition="N^2 - N*beta* - [(N+beta*)L + (F+1)beta*] gamma*_{L+1} > 0",
        )
    return value


def sensing_utilities(
    cfg: NetworkConfig,
    model: EfficiencyModel,
    profile: SensingProfile,
    i: int,
    action: str,
    consistent_gamma_index=False,
) -> float:
    """``U_i^S(F, L)`` or ``U_i^NS(F, L)`` for player ``i`` in bit/J."""
    if profile.K != cfg.K:
        raise ConfigError(f"profile covers {profile.K} players, config has K={cfg.K}")
    if not 0 <= i < cfg.K:
        raise IndexError(f"player index {i} out of range for K={cfg.K}")
    unit = unit_sensing_utility(model, cfg.K, cfg.N, profile.F, profile.L, action, consistent_gamma_index)
    return float(cfg.weights[i]) * unit
