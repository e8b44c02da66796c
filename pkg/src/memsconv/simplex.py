"""Dense two-phase tableau simplex with Bland's rule.

Solves  min c^T x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.
When phase 1 ends with a positive artificial sum the problem is infeasible and the
phase-1 duals give a Farkas ray: multipliers u_eq (free), u_ub >= 0 with
u_eq^T A_eq + u_ub^T A_ub >= 0 componentwise and u_eq^T b_eq + u_ub^T b_ub < 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9
HARRIS_TOL = 1e-12


class SimplexError(RuntimeError):
    pass


class IterationLimit(SimplexError):
    pass


@dataclass
class SimplexResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None
    objective: float | None
    phase1_objective: float
    iterations: int
    ray_eq: np.ndarray | None = None
    ray_ub: np.ndarray | None = None


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray, pivot_tol: float, max_iter: int):
        self.T = T
        self.basis = basis
        self.pivot_tol = pivot_tol
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        if rows.size:
            # slack columns keep the pivot row sparse; touch only its nonzeros
            cols = np.flatnonzero(T[r])
            if cols.size * 3 < T.shape[1]:
                T[np.ix_(rows, cols)] -= col[rows, None] * T[r, cols]
            else:
                T[rows] -= np.outer(col[rows], T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.iterations += 1

    def run(self, allowed: np.ndarray) -> str:
        """Iterate to optimality on the objective held in the last row."""
        T, tol = self.T, self.pivot_tol
        m = T.shape[0] - 1
        while True:
            if self.iterations >= self.max_iter:
                raise IterationLimit(f"simplex exceeded {self.max_iter} pivots")
            cand = np.flatnonzero((T[-1, :-1] < -tol) & allowed)
            if cand.size == 0:
                return "optimal"
            j = int(cand[0])  # Bland: lowest index entering
            col = T[:m, j]
            pos = np.flatnonzero(col > tol)
            if pos.size == 0:
                return "unbounded"
            # Harris two-pass: bound the step with a small rhs slack, then take the
            # largest pivot among rows inside the bound (ties: lowest basic index)
            rhs = np.maximum(T[pos, -1], 0.0)
            step = ((rhs + HARRIS_TOL) / col[pos]).min()
            inside = pos[rhs / col[pos] <= step]
            mags = col[inside]
            big = inside[mags >= mags.max() * (1 - 1e-12)]
            r = int(big[np.argmin(self.basis[big])])
            self.pivot(r, j)
            np.maximum(T[:m, -1], 0.0, out=T[:m, -1])


def solve(
    c: np.ndarray | None,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    A_ub: np.ndarray,
    b_ub: np.ndarray,
    *,
    pivot_tol: float = PIVOT_TOL,
    feas_tol: float = FEAS_TOL,
    max_iter: int = 20000,
) -> SimplexResult:
    A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
    A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_eq = np.asarray(b_eq, dtype=float).ravel()
    b_ub = np.asarray(b_ub, dtype=float).ravel()
    n = A_eq.shape[1] if A_eq.size else A_ub.shape[1]
    A_eq = A_eq.reshape(-1, n)
    A_ub = A_ub.reshape(-1, n)
    e, k = A_eq.shape[0], A_ub.shape[0]
    m = e + k
    c = np.zeros(n) if c is None else np.asarray(c, dtype=float)

    # rows: eq then ub; columns: x | slacks (k) | artificials (one per row needing one) | rhs
    flip = np.ones(m)
    flip[:e] = np.where(b_eq < 0, -1.0, 1.0)
    flip[e:] = np.where(b_ub < 0, -1.0, 1.0)
    needs_art = np.concatenate([np.ones(e, bool), b_ub < 0])
    art_rows = np.flatnonzero(needs_art)
    na = art_rows.size
    ncol = n + k + na
    T = np.zeros((m + 1, ncol + 1))
    T[:e, :n] = A_eq
    T[e:m, :n] = A_ub
    T[e + np.arange(k), n + np.arange(k)] = 1.0
    T[:e, -1] = b_eq
    T[e:m, -1] = b_ub
    T[:m] *= flip[:, None]
    T[art_rows, n + k + np.arange(na)] = 1.0
    basis = np.empty(m, dtype=int)
    basis[e:] = n + np.arange(k)
    basis[art_rows] = n + k + np.arange(na)

    # phase 1 objective: minimise the artificial sum
    T[-1, :] = -T[art_rows].sum(axis=0)
    T[-1, n + k:ncol] = 0.0
    tab = _Tableau(T, basis, pivot_tol, max_iter)
    tab.run(np.ones(ncol, bool))
    w = -T[-1, -1]

    if w > feas_tol:
        # y_r from reduced costs: artificial column d = 1 - y_r, slack column d = -y_r
        y = np.empty(m)
        y[e:] = -T[-1, n:n + k]
        y[art_rows] = 1.0 - T[-1, n + k + np.arange(na)]
        u = -flip * y
        u_ub = np.maximum(u[e:], 0.0)
        return SimplexResult("infeasible", None, None, float(w), tab.iterations, u[:e], u_ub)

    # drive artificials out of the basis where a non-artificial pivot exists
    allowed = np.zeros(ncol, bool)
    allowed[: n + k] = True
    # (largest element, residual zeroed: a tiny pivot would blow the residual up)
    for r in range(m):
        if basis[r] >= n + k:
            j = int(np.argmax(np.abs(T[r, : n + k])))
            if abs(T[r, j]) > 1e-7:
                T[r, -1] = 0.0
                tab.pivot(r, j)

    # phase 2
    T[-1, :] = 0.0
    T[-1, :n] = c
    for r in range(m):
        cb = c[basis[r]] if basis[r] < n else 0.0
        if cb != 0.0:
            T[-1] -= cb * T[r]
    status = tab.run(allowed)
    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r, -1]
    if status == "unbounded":
        return SimplexResult("unbounded", x, None, float(w), tab.iterations)
    return SimplexResult("optimal", x, float(c @ x), float(w), tab.iterations)
