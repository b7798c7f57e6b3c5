"""Dense-tableau simplex for covering LPs.

Solves   min c.x  s.t.  A x >= b,  x >= 0   with c >= 0
by running primal simplex on the dual

         max b.y  s.t.  A^T y <= c,  y >= 0,

whose slack basis y = 0 is feasible because c >= 0.  The primal optimum is
read off the objective row under the slack columns.  Bland's rule
(lowest-index entering and leaving variable) prevents cycling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

PIVOT_TOL = 1e-12


class UnboundedDualError(ArithmeticError):
    """The dual is unbounded, so the covering LP is infeasible."""


@dataclass(frozen=True)
class LPSolution:
    value: float
    x: np.ndarray
    y: np.ndarray
    iterations: int


def solve_covering_lp(A, b, c=None, max_iter: int = 100_000) -> LPSolution:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    p, n = A.shape
    c = np.ones(n) if c is None else np.asarray(c, dtype=float)
    if b.shape != (p,) or c.shape != (n,):
        raise InvalidArgumentError("inconsistent LP dimensions")
    if np.any(c < 0):
        raise InvalidArgumentError("objective coefficients must be nonnegative")

    # rows: n dual constraints; columns: p dual vars, n slacks, rhs
    T = np.zeros((n + 1, p + n + 1))
    T[:n, :p] = A.T
    T[:n, p:p + n] = np.eye(n)
    T[:n, -1] = c
    T[n, :p] = -b
    basis = list(range(p, p + n))

    it = 0
    while True:
        neg = np.nonzero(T[n, :-1] < -PIVOT_TOL)[0]
        if len(neg) == 0:
            break
        if it >= max_iter:
            raise RuntimeError("simplex iteration limit reached")
        j = int(neg[0])
        col = T[:n, j]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if len(rows) == 0:
            raise UnboundedDualError("covering LP is infeasible")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        T[r] /= T[r, j]
        others = np.nonzero(T[:, j])[0]
        others = others[others != r]
        T[others] -= np.outer(T[others, j], T[r])
        basis[r] = j
        it += 1

    y = np.zeros(p)
    for r, v in enumerate(basis):
        if v < p:
            y[v] = T[r, -1]
    x = T[n, p:p + n].copy()
    x[np.abs(x) < PIVOT_TOL] = 0.0
    return LPSolution(value=float(T[n, -1]), x=x, y=y, iterations=it)
