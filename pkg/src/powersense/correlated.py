"""Canonical correlated equilibria of finite games.

Incentive constraints are used in unconditional form,
``sum_{a_-i} Q(a_i, a_-i) [u_i(a_i, a_-i) - u_i(b_i, a_-i)] >= 0``,
which is linear in ``Q`` and vacuous when ``Q(a_i) = 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, GameSizeError
from .finite_game import FiniteGame
from .lp import OPTIMAL, simplex_max
from .two_player import SensingMatrix2x2

MAX_VERTEX_VARIABLES = 6
SNAP = 1e-9


def _snap(q, eps=SNAP):
    """Zero out round-off mass below ``eps`` and renormalise.

    LP and linear-solve round-off leaves ~1e-12 mass on cells outside the
    support; conditioning on such a marginal would blow the residual up.
    """
    q = np.where(np.asarray(q, dtype=float) < eps, 0.0, q)
    return q / q.sum()


def _as_game(game):
    return game.game() if isinstance(game, SensingMatrix2x2) else game


def incentive_constraints(game: FiniteGame):
    """Rows ``A`` with ``A @ Q.ravel() >= 0`` and their ``(player, recommended, deviation)`` labels."""
    game = _as_game(game)
    rows, labels = [], []
    for i in range(game.K):
        u = game.utility(i)
        for a in range(game.shape[i]):
            for b in range(game.shape[i]):
                if a == b:
                    continue
                row = np.zeros(game.shape)
                sl = [slice(None)] * game.K
                sl[i] = a
                dev = [slice(None)] * game.K
                dev[i] = b
                row[tuple(sl)] = u[tuple(sl)] - u[tuple(dev)]
                rows.append(row.ravel())
                labels.append((i, a, b))
    return np.array(rows).reshape(len(rows), -1), labels


@dataclass
class CorrelatedDistribution:
    """Mass ``Q`` over joint actions and conditional incentive slacks.

    ``residuals[i][a, b]`` is the conditional expected gain of obeying
    recommendation ``a`` over deviating to ``b`` (NaN when ``Q(a) = 0`` or
    ``a == b``).
    """

    Q: np.ndarray
    residuals: list
    utilities: np.ndarray
    objective: float | None = None

    def to_dict(self):
        return {
            "Q": self.Q.ravel().tolist(),
            "utilities": self.utilities.tolist(),
            "objective": self.objective,
        }


def _check_distribution(game, Q):
    Q = np.asarray(Q, dtype=float)
    if Q.shape != game.shape:
        Q = Q.reshape(game.shape)
    if np.any(Q < -1e-12) or abs(Q.sum() - 1.0) > 1e-12:
        raise ConfigError("Q must be nonnegative and sum to one")
    return Q


def conditional_residuals(game: FiniteGame, Q):
    game = _as_game(game)
    Q = _check_distribution(game, Q)
    residuals = []
    for i in range(game.K):
        n = game.shape[i]
        axes = tuple(k for k in range(game.K) if k != i)
        marginal = Q.sum(axis=axes)
        u = game.utility(i)
        res = np.full((n, n), np.nan)
        for a in range(n):
            if marginal[a] <= 0:
                continue
            cond = np.take(Q, a, axis=i) / marginal[a]
            obey = np.take(u, a, axis=i)
            for b in range(n):
                if b != a:
                    res[a, b] = float(np.sum(cond * (obey - np.take(u, b, axis=i))))
        residuals.append(res)
    return residuals


def expected_utilities(game: FiniteGame, Q):
    game = _as_game(game)
    Q = np.asarray(Q, dtype=float).reshape(game.shape)
    return np.array([float(np.sum(Q * game.utility(i))) for i in range(game.K)])


def is_correlated_equilibrium(game: FiniteGame, Q, tol=1e-12):
    """``(ok, residuals)``: every recommendation with positive mass is obeyed within ``tol``."""
    residuals = conditional_residuals(game, Q)
    ok = all(np.all(np.nan_to_num(r, nan=np.inf) >= -tol) for r in residuals)
    return ok, residuals


def _distribution(game, Q, objective=None):
    game = _as_game(game)
    Q = np.asarray(Q, dtype=float).reshape(game.shape)
    return CorrelatedDistribution(Q, conditional_residuals(game, Q), expected_utilities(game, Q), objective)


def product_distribution(*strategies):
    """Joint distribution of independent mixed strategies."""
    Q = np.asarray(strategies[0], dtype=float)
    for s in strategies[1:]:
        Q = np.multiply.outer(Q, np.asarray(s, dtype=float))
    return Q


def lambda_mixture(game2x2, lam: float) -> CorrelatedDistribution:
    """Lottery placing ``lam`` on ``(S, NS)`` and ``1 - lam`` on ``(NS, S)``."""
    if not 0 <= lam <= 1:
        raise ConfigError("lambda must lie in [0, 1]")
    game = _as_game(game2x2)
    if game.shape != (2, 2):
        raise ConfigError("lambda mixtures are defined on 2x2 games")
    Q = np.zeros((2, 2))
    Q[1, 0] = lam
    Q[0, 1] = 1 - lam
    return _distribution(game, Q)


def _objective_vector(game, objective):
    obj = np.asarray(objective, dtype=float)
    if obj.shape != game.shape:
        obj = obj.reshape(game.shape)
    if not np.all(np.isfinite(obj)):
        raise ConfigError("objective must be finite")
    return obj.ravel()


def optimize_over_ce(game: FiniteGame, objective) -> CorrelatedDistribution:
    """Correlated equilibrium maximising ``sum_s objective(s) Q(s)``."""
    game = _as_game(game)
    c = _objective_vector(game, objective)
    A, _ = incentive_constraints(game)
    n = c.size
    res = simplex_max(c, A_ub=-A, b_ub=np.zeros(A.shape[0]), A_eq=np.ones((1, n)), b_eq=[1.0])
    if res.status != OPTIMAL:
        raise RuntimeError(f"correlated-equilibrium LP returned {res.status}; pure equilibria make it feasible")
    Q = _snap(res.x)
    return _distribution(game, Q, float(c @ Q))


def ce_vertices(game: FiniteGame, tol=1e-10) -> np.ndarray:
    """Vertices of the correlated-equilibrium polytope by exhaustive active-set enumeration."""
    game = _as_game(game)
    n = int(np.prod(game.shape))
    if n > MAX_VERTEX_VARIABLES:
        raise GameSizeError(f"vertex enumeration limited to {MAX_VERTEX_VARIABLES} joint actions")
    A, _ = incentive_constraints(game)
    G = np.vstack([A, np.eye(n)])  # G @ Q >= 0
    scale = max(1.0, float(np.abs(G).max()))
    found = []
    for active in itertools.combinations(range(G.shape[0]), n - 1):
        M = np.vstack([G[list(active)], np.ones(n)])
        if abs(np.linalg.det(M)) < 1e-12 * scale ** (n - 1):
            continue
        rhs = np.zeros(n)
        rhs[-1] = 1.0
        q = np.linalg.solve(M, rhs)
        if np.all(G @ q >= -tol * scale):
            q = _snap(q)
            if not any(np.allclose(q, v, atol=1e-9) for v in found):
                found.append(q)
    return np.array(found)


def ce_vertex_optimum(game: FiniteGame, objective) -> float:
    game = _as_game(game)
    c = _objective_vector(game, objective)
    return float(np.max(ce_vertices(game) @ c))


@dataclass
class RegionPoint:
    theta: float
    end: int
    u1: float
    u2: float
    Q: np.ndarray


def _face_endpoints(game, direction, tol):
    """Both extreme points of the optimal face of the CE utility set in ``direction``."""
    A, _ = incentive_constraints(game)
    u1, u2 = game.utility(0).ravel(), game.utility(1).ravel()
    n = u1.size
    c = direction[0] * u1 + direction[1] * u2
    base = simplex_max(c, A_ub=-A, b_ub=np.zeros(A.shape[0]), A_eq=np.ones((1, n)), b_eq=[1.0])
    if base.status != OPTIMAL:
        raise RuntimeError(f"correlated-equilibrium LP returned {base.status}")
    slack = tol * max(1.0, abs(base.value))
    perp = -direction[1] * u1 + direction[0] * u2
    out = []
    for sign in (-1.0, 1.0):
        res = simplex_max(
            sign * perp,
            A_ub=np.vstack([-A, -c]),
            b_ub=np.concatenate([np.zeros(A.shape[0]), [-(base.value - slack)]]),
            A_eq=np.ones((1, n)),
            b_eq=[1.0],
        )
        out.append(base.x if res.status != OPTIMAL else res.x)
    return out


def ce_utility_region(game2x2, angles=72, tol=1e-12) -> list[RegionPoint]:
    """Boundary of the correlated-equilibrium utility region.

    For each direction ``theta`` the optimal face of
    ``cos(theta) u_1 + sin(theta) u_2`` is found and both of its endpoints are
    emitted (``end`` 0 and 1; they coincide on a vertex).  ``angles`` is a
    count of equally spaced directions or an explicit sequence.
    """
    game = _as_game(game2x2)
    if game.K != 2:
        raise ConfigError("utility regions are computed for 2-player games")
    thetas = np.linspace(0.0, 2 * math.pi, int(angles), endpoint=False) if np.isscalar(angles) else np.asarray(angles)
    points = []
    for theta in thetas:
        d = (math.cos(theta), math.sin(theta))
        for end, q in enumerate(_face_endpoints(game, d, tol)):
            Q = _snap(q)
            u = expected_utilities(game, Q)
            points.append(RegionPoint(float(theta), end, float(u[0]), float(u[1]), Q.reshape(game.shape)))
    return points


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise hull of 2-D points (monotone chain)."""
    pts = sorted(set(map(tuple, np.round(np.asarray(points, dtype=float), 12))))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _segment_distance(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + t * ab)))


def distance_to_region(points, u) -> float:
    """Euclidean distance from ``u`` to the convex hull of ``points`` (0 inside)."""
    hull = convex_hull(points)
    p = np.asarray(u, dtype=float)
    if len(hull) == 1:
        return float(np.linalg.norm(p - hull[0]))
    edges = list(zip(hull, np.roll(hull, -1, axis=0)))
    if len(hull) >= 3:
        inside = all((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0 for a, b in edges)
        if inside:
            return 0.0
    return min(_segment_distance(p, a, b) for a, b in edges)
