"""Small dense two-phase simplex (Bland's rule).

Intended for the tiny, highly degenerate correlated-equilibrium programs;
Bland's rule avoids cycling at the cost of speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    value: float | None
    iterations: int


def _pivot(T, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run(T, basis, cost, allowed, tol, max_iter):
    """Minimise ``cost @ x`` on tableau ``T`` (last column = rhs). Returns status, iterations."""
    m = T.shape[0]
    for it in range(max_iter):
        cb = cost[basis]
        reduced = cost - cb @ T[:, :-1]
        entering = next((j for j in allowed if reduced[j] < -tol), None)
        if entering is None:
            return OPTIMAL, it
        col = T[:, entering]
        best, leave = None, None
        for r in range(m):
            if col[r] > tol:
                ratio = T[r, -1] / col[r]
                if best is None or ratio < best - tol or (abs(ratio - best) <= tol and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            return UNBOUNDED, it
        _pivot(T, leave, entering)
        basis[leave] = entering
    raise RuntimeError("simplex iteration limit reached")


def simplex_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol=1e-12, max_iter=10_000) -> LPResult:
    """Maximise ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    A = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    slack = np.vstack([np.eye(m_ub), np.zeros((m_eq, m_ub))])
    flip = b < 0
    A[flip] *= -1
    slack[flip] *= -1
    b[flip] *= -1

    needs_art = [r for r in range(m) if r >= m_ub or flip[r]]
    art = np.zeros((m, len(needs_art)))
    for k, r in enumerate(needs_art):
        art[r, k] = 1.0
    T = np.hstack([A, slack, art, b[:, None]])
    n_real = n + m_ub
    n_total = n_real + len(needs_art)
    basis = [n + r for r in range(m_ub)] + [0] * m_eq
    for k, r in enumerate(needs_art):
        basis[r] = n_real + k

    iterations = 0
    if needs_art:
        cost1 = np.zeros(n_total)
        cost1[n_real:] = 1.0
        status, it = _run(T, basis, cost1, range(n_total), tol, max_iter)
        iterations += it
        scale = max(1.0, float(np.abs(b).max(initial=0.0)))
        if T[:, -1] @ cost1[basis] > 1e-9 * scale:
            return LPResult(INFEASIBLE, None, None, iterations)
        # drive zero-level artificials out of the basis, drop redundant rows
        keep = []
        for r in range(m):
            if basis[r] >= n_real:
                cand = [j for j in range(n_real) if abs(T[r, j]) > tol]
                if not cand:
                    continue
                _pivot(T, r, cand[0])
                basis[r] = cand[0]
            keep.append(r)
        T = T[keep]
        basis = [basis[r] for r in keep]
        T = np.hstack([T[:, :n_real], T[:, -1:]])

    cost2 = np.zeros(n_real)
    cost2[:n] = -c
    status, it = _run(T, basis, cost2, range(n_real), tol, max_iter)
    iterations += it
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None, iterations)
    x = np.zeros(n_real)
    x[basis] = T[:, -1]
    x = np.clip(x[:n], 0.0, None)
    return LPResult(OPTIMAL, x, float(c @ x), iterations)
