"""Static energy-efficient power-control game.

Channel inputs are power gains ``h_i = |g_i|^2``.  The processing gain ``N``
only parameterises the sensing-game formulas; SINR and the Nash powers below
use ``N = 1`` semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .efficiency import EfficiencyModel, solve_beta
from .exceptions import ConfigError, InfeasibleKError, SaturationError


def _vector(name, values, K, allow_inf=False):
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.shape == (1,) and K > 1:
        arr = np.full(K, arr[0])
    if arr.shape != (K,):
        raise ConfigError(f"{name} must have length K={K}, got {arr.shape[0]}")
    if np.any(np.isnan(arr)) or np.any(arr <= 0) or (not allow_inf and not np.all(np.isfinite(arr))):
        raise ConfigError(f"all {name} must be positive and finite")
    return arr


@dataclass
class NetworkConfig:
    """Players, channel gains, rates and noise of the multiple-access channel.

    Scalars given for ``h``, ``R`` or ``Pmax`` are broadcast to all players.
    """

    K: int
    h: np.ndarray
    R: np.ndarray
    sigma2: float
    Pmax: np.ndarray = field(default_factory=lambda: np.array([np.inf]))
    alpha: float = 0.0
    N: float = 1.0

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError("K must be an integer >= 1")
        self.K = int(self.K)
        self.h = _vector("h", self.h, self.K)
        self.R = _vector("R", self.R, self.K)
        self.Pmax = _vector("Pmax", self.Pmax, self.K, allow_inf=True)
        if not self.sigma2 > 0:
            raise ConfigError("sigma2 must be positive")
        if not 0 <= self.alpha < 1:
            raise ConfigError("alpha must lie in [0, 1)")
        if not self.N >= 1:
            raise ConfigError("N must be >= 1")
        self.sigma2 = float(self.sigma2)
        self.alpha = float(self.alpha)
        self.N = float(self.N)

    @property
    def weights(self):
        """Per-player weights ``R_i h_i / sigma2``."""
        return self.R * self.h / self.sigma2

    def replace(self, **changes):
        kw = dict(K=self.K, h=self.h, R=self.R, sigma2=self.sigma2, Pmax=self.Pmax, alpha=self.alpha, N=self.N)
        kw.update(changes)
        return NetworkConfig(**kw)

    def to_dict(self):
        return {
            "K": self.K,
            "h": self.h.tolist(),
            "R": self.R.tolist(),
            "sigma2": self.sigma2,
            "Pmax": self.Pmax.tolist(),
            "alpha": self.alpha,
            "N": self.N,
        }


def _check_index(cfg, i):
    if not 0 <= i < cfg.K:
        raise IndexError(f"player index {i} out of range for K={cfg.K}")


def _check_powers(cfg, p):
    p = np.asarray(p, dtype=float)
    if p.shape != (cfg.K,):
        raise ConfigError(f"power vector must have length {cfg.K}")
    if np.any(p < 0) or np.any(p > cfg.Pmax):
        raise ConfigError("powers must satisfy 0 <= p_i <= Pmax_i")
    return p


def sinr_all(cfg: NetworkConfig, p) -> np.ndarray:
    p = _check_powers(cfg, p)
    received = p * cfg.h
    return received / (received.sum() - received + cfg.sigma2)


def sinr(cfg: NetworkConfig, p, i: int) -> float:
    _check_index(cfg, i)
    return float(sinr_all(cfg, p)[i])


def utility_all(cfg: NetworkConfig, model: EfficiencyModel, p) -> np.ndarray:
    """Energy efficiency ``R_i f(SINR_i) / p_i`` in bit/J; zero where ``p_i = 0``."""
    p = _check_powers(cfg, p)
    gamma = sinr_all(cfg, p)
    out = np.zeros(cfg.K)
    on = p > 0
    out[on] = cfg.R[on] * model.f(gamma[on]) / p[on]
    return out


def utility(cfg: NetworkConfig, model: EfficiencyModel, p, i: int) -> float:
    _check_index(cfg, i)
    return float(utility_all(cfg, model, p)[i])


def nash_powers(cfg: NetworkConfig, model: EfficiencyModel) -> np.ndarray:
    """Non-saturated Nash powers ``(sigma2/h_i) beta / (1 - (K-1) beta)``."""
    beta = solve_beta(model).value
    denom = 1.0 - (cfg.K - 1) * beta
    if denom <= 0:
        raise InfeasibleKError(
            f"(K-1) beta* = {(cfg.K - 1) * beta:.6g} >= 1: no non-saturated Nash equilibrium",
            condition="(K-1)*beta* < 1",
        )
    p = cfg.sigma2 / cfg.h * beta / denom
    over = np.flatnonzero(p > cfg.Pmax)
    if over.size:
        raise SaturationError(
            f"Nash power exceeds Pmax for players {over.tolist()}", condition="p_i* <= Pmax_i"
        )
    return p


def nash_utility(cfg: NetworkConfig, model: EfficiencyModel) -> np.ndarray:
    """Closed-form utility at the Nash powers."""
    beta = solve_beta(model).value
    return cfg.R * cfg.h * model.f(beta) * (1 - (cfg.K - 1) * beta) / (cfg.sigma2 * beta)


def best_response(cfg: NetworkConfig, model: EfficiencyModel, p, i: int, beta=None) -> float:
    """Power that puts player ``i`` at SINR ``beta*``, capped at ``Pmax_i``."""
    _check_index(cfg, i)
    p = np.asarray(p, dtype=float)
    if beta is None:
        beta = solve_beta(model).value
    interference = float(np.dot(p, cfg.h) - p[i] * cfg.h[i])
    return min(float(cfg.Pmax[i]), beta * (cfg.sigma2 + interference) / cfg.h[i])


@dataclass
class BRResult:
    powers: np.ndarray
    converged: bool
    iterations: int
    saturated: bool


def br_dynamics(cfg: NetworkConfig, model: EfficiencyModel, init, tol=1e-12, max_iter=10_000) -> BRResult:
    """Gauss-Seidel best-response sweeps in ascending player order.

    Stops when the largest power change within a sweep is at most ``tol``.
    Non-convergence is reported through ``converged=False``.
    """
    beta = solve_beta(model).value
    p = _check_powers(cfg, init).copy()
    for sweep in range(1, max_iter + 1):
        change = 0.0
        for i in range(cfg.K):
            new = best_response(cfg, model, p, i, beta)
            change = max(change, abs(new - p[i]))
            p[i] = new
        if change <= tol:
            return BRResult(p, True, sweep, bool(np.any(p >= cfg.Pmax)))
    return BRResult(p, False, max_iter, bool(np.any(p >= cfg.Pmax)))
