"""Equilibrium analysis of energy-efficient power control with optional sensing."""

from .efficiency import EfficiencyModel, RootResult, solve_beta, solve_gamma, solve_gamma_L
from .finite_game import FiniteGame
from .oneshot import NetworkConfig

__all__ = [
    "EfficiencyModel",
    "FiniteGame",
    "NetworkConfig",
    "RootResult",
    "solve_beta",
    "solve_gamma",
    "solve_gamma_L",
]
