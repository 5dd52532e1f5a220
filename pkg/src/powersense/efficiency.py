"""Sigmoidal efficiency functions and the SINR-target root equations.

Every equilibrium formula in the package is driven by three scalars:

* ``beta``  -- root of ``x f'(x) = f(x)`` (one-shot Nash SINR target),
* ``gamma`` -- root of ``x (1 - c x) f'(x) = f(x)`` with the Stackelberg
  coefficient ``c = (K-1) beta / (1 - (K-2) beta)``,
* ``gamma_L`` -- the same equation with ``c = eps_L`` (sensing game).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .exceptions import BracketNotFoundError, ConfigError, InfeasibleKError, InfeasibleProfileError

EXP_RATIO = "exp_ratio"
GOODMAN = "goodman"
FAMILIES = (EXP_RATIO, GOODMAN)

SEARCH_LO = 1e-6
SEARCH_HI = 1e3
GRID_POINTS = 1024
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class EfficiencyModel:
    """Block-success function ``f`` of the SINR.

    ``exp_ratio``: ``f(x) = exp(-a / x)``, ``a > 0``.
    ``goodman``:   ``f(x) = (1 - exp(-x)) ** M``, integer ``M >= 2``.
    """

    family: str
    param: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown efficiency family {self.family!r}; expected one of {FAMILIES}")
        if self.family == EXP_RATIO:
            if not (self.param > 0 and math.isfinite(self.param)):
                raise ConfigError("exp_ratio parameter a must be positive and finite")
        else:
            if int(self.param) != self.param or self.param < 2:
                raise ConfigError("goodman parameter M must be an integer >= 2")
            object.__setattr__(self, "param", int(self.param))

    @classmethod
    def exp_ratio(cls, a):
        return cls(EXP_RATIO, float(a))

    @classmethod
    def goodman(cls, M):
        return cls(GOODMAN, M)

    def f(self, x):
        """Evaluate ``f``; accepts scalars or arrays, ``f(0) = 0``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ConfigError("efficiency function is defined for x >= 0 only")
        if self.family == EXP_RATIO:
            with np.errstate(divide="ignore"):
                out = np.where(x > 0, np.exp(-self.param / np.where(x > 0, x, 1.0)), 0.0)
        else:
            out = (-np.expm1(-x)) ** self.param
        return out[()] if out.ndim == 0 else out

    def df(self, x):
        """Analytic derivative ``f'(x)``."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise ConfigError("efficiency function is defined for x >= 0 only")
        if self.family == EXP_RATIO:
            a = self.param
            safe = np.where(x > 0, x, 1.0)
            out = np.where(x > 0, a / safe**2 * np.exp(-a / safe), 0.0)
        else:
            M = self.param
            out = M * (-np.expm1(-x)) ** (M - 1) * np.exp(-x)
        return out[()] if out.ndim == 0 else out

    def to_dict(self):
        key = "a" if self.family == EXP_RATIO else "M"
        return {"family": self.family, key: self.param}


def eval_f(model: EfficiencyModel, x: float) -> float:
    if x < 0:
        raise ConfigError(f"x must be nonnegative, got {x}")
    return float(model.f(x))


@dataclass(frozen=True)
class RootResult:
    value: float
    residual: float
    iterations: int
    epsilon: float | None = None

    def __float__(self):
        return self.value


def leader_equation(model: EfficiencyModel, coefficient: float):
    """Return ``g(x) = x (1 - c x) f'(x) - f(x)``; ``c = 0`` gives the Nash equation."""

    def g(x):
        return x * (1.0 - coefficient * x) * model.df(x) - model.f(x)

    return g


def _sign_changes(g, lo, hi):
    xs = np.geomspace(lo, hi, GRID_POINTS)
    vals = np.asarray(g(xs), dtype=float)
    keep = vals != 0.0
    xs, signs = xs[keep], np.sign(vals[keep])
    idx = np.flatnonzero(signs[:-1] != signs[1:])
    return [(xs[k], xs[k + 1]) for k in idx]


def _bracketed_root(g, lo, hi, tol, what):
    brackets = _sign_changes(g, lo, hi)
    if not brackets:
        raise BracketNotFoundError(f"{what}: no sign change on [{lo:g}, {hi:g}]")
    if len(brackets) > 1:
        warnings.warn(f"{what}: {len(brackets)} sign changes found, using the smallest root", RuntimeWarning)
    a, b = brackets[0]
    x, info = brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500, full_output=True)
    residual = float(g(x))
    if abs(residual) > tol:
        raise BracketNotFoundError(f"{what}: residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return x, residual, info.iterations


@lru_cache(maxsize=4096)
def solve_leader_target(model: EfficiencyModel, coefficient: float, tol: float = DEFAULT_TOL) -> RootResult:
    """Root of ``x (1 - c x) f'(x) = f(x)`` for ``c >= 0``."""
    if coefficient < 0:
        raise ConfigError("coefficient must be nonnegative")
    hi = SEARCH_HI if coefficient == 0 else min(SEARCH_HI, 1.0 / coefficient)
    x, res, it = _bracketed_root(leader_equation(model, coefficient), SEARCH_LO, hi, tol, f"c={coefficient:g}")
    return RootResult(float(x), res, it)


def solve_beta(model: EfficiencyModel, tol: float = DEFAULT_TOL) -> RootResult:
    """Nash SINR target: unique positive root of ``x f'(x) = f(x)``."""
    return solve_leader_target(model, 0.0, tol)


def stackelberg_coefficient(beta: float, K: int) -> float:
    denom = 1.0 - (K - 2) * beta
    if K < 2:
        raise ConfigError("Stackelberg coefficient needs K >= 2")
    if denom <= 0:
        raise InfeasibleKError(
            f"1 - (K-2) beta* = {denom:.6g} <= 0 for K={K}", condition="1 - (K-2)*beta* > 0"
        )
    return (K - 1) * beta / denom


def solve_gamma(model: EfficiencyModel, K: int, tol: float = DEFAULT_TOL) -> RootResult:
    """Leader SINR target ``gamma*`` of the K-player hierarchy."""
    beta = solve_beta(model, tol).value
    return solve_leader_target(model, stackelberg_coefficient(beta, K), tol)


def epsilon_L(beta: float, K: int, N: float, L: int) -> float:
    denom = N * N - N * (K + 1 - L) * beta
    if denom <= 0:
        raise InfeasibleProfileError(
            f"N^2 - N(K+1-L) beta* = {denom:.6g} <= 0 (K={K}, N={N:g}, L={L})",
            condition="N^2 - N*(K+1-L)*beta* > 0",
        )
    eps = (K + 2 - L) * beta / denom
    if eps <= 0:
        raise InfeasibleProfileError(f"eps_L = {eps:.6g} <= 0 (K={K}, L={L})", condition="eps_L > 0")
    return eps


def solve_gamma_L(model: EfficiencyModel, K: int, N: float, L: int, tol: float = DEFAULT_TOL) -> RootResult:
    """Sensing-game leader target ``gamma*_L``; ``eps_L`` is attached to the result."""
    beta = solve_beta(model, tol).value
    eps = epsilon_L(beta, K, N, L)
    r = solve_leader_target(model, eps, tol)
    return RootResult(r.value, r.residual, r.iterations, epsilon=eps)
