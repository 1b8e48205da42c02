"""Dense linear programming in standard form.

Solves  min c.x  subject to  A x = b,  x >= 0  with a revised simplex method
using Bland's anti-cycling rule (smallest-index entering variable, smallest
basic-variable index on ratio-test ties).  Two phases: artificial variables
give a starting basis, redundant rows discovered in phase 1 are dropped.

Problem sizes here are small (tens of rows), so the basis is refactorized at
every iteration; determinism and exactness at vertices matter more than speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LpProblem",
    "LpError",
    "LpInfeasibleError",
    "LpUnboundedError",
    "LpIterationError",
    "lp_solve",
]


class LpError(RuntimeError):
    """Base class for LP solver failures."""


class LpInfeasibleError(LpError):
    """The constraint system A x = b, x >= 0 has no solution."""


class LpUnboundedError(LpError):
    """The objective is unbounded below on the feasible region."""


class LpIterationError(LpError):
    """The simplex method exceeded its iteration budget."""


@dataclass(frozen=True)
class LpProblem:
    """Standard-form data:  min objective . x,  constraints x = rhs,  x >= 0."""

    objective: np.ndarray
    constraints: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.constraints, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if c.ndim != 1:
            raise ValueError("objective must be a 1d vector")
        if a.ndim != 2:
            raise ValueError("constraints must be a 2d matrix")
        if b.ndim != 1:
            raise ValueError("rhs must be a 1d vector")
        if a.shape != (b.size, c.size):
            raise ValueError(
                f"shape mismatch: constraints {a.shape}, rhs {b.size}, objective {c.size}"
            )
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("problem must have at least one row and one column")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("problem data must be finite")
        for arr, name in ((c, "objective"), (a, "constraints"), (b, "rhs")):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_rows(self) -> int:
        return self.constraints.shape[0]

    @property
    def num_cols(self) -> int:
        return self.constraints.shape[1]


def _simplex_phase(a, b, c, basis, tol, max_iter):
    """Run simplex iterations from a feasible basis; mutates ``basis`` in place.

    Returns the basic solution values for ``basis`` at optimality.
    """
    m, n = a.shape
    for _ in range(max_iter):
        a_basis = a[:, basis]
        x_basis = np.linalg.solve(a_basis, b)
        duals = np.linalg.solve(a_basis.T, c[basis])
        reduced = c - a.T @ duals
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            return x_basis
        enter = int(candidates[0])  # Bland: smallest entering index
        direction = np.linalg.solve(a_basis, a[:, enter])
        positive = direction > tol
        if not np.any(positive):
            raise LpUnboundedError("objective unbounded below")
        ratios = np.full(m, np.inf)
        # Clamp tiny negative basic values (degenerate roundoff) to zero.
        ratios[positive] = np.maximum(x_basis[positive], 0.0) / direction[positive]
        theta = ratios.min()
        # Bland: among ratio ties, leave the basic variable with smallest index.
        ties = np.flatnonzero(ratios <= theta + 1e-12 * (1.0 + abs(theta)))
        leave = min(ties, key=lambda r: basis[r])
        basis[leave] = enter
    raise LpIterationError(f"simplex exceeded {max_iter} iterations")


def lp_solve(problem: LpProblem, tol: float = 1e-9, max_iter: int = 20000):
    """Solve a standard-form LP; returns ``(optimal value, primal solution)``.

    Raises :class:`LpInfeasibleError`, :class:`LpUnboundedError` or
    :class:`LpIterationError`.  The solution is a vertex of the feasible
    region; the objective value is accurate to roughly ``tol``.
    """
    a = problem.constraints.copy()
    b = problem.rhs.copy()
    c = problem.objective
    m, n = a.shape

    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # Phase 1: minimize the sum of artificial variables.
    a1 = np.hstack([a, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    x_basis = _simplex_phase(a1, b, c1, basis, tol, max_iter)
    infeas = float(np.sum(x_basis[[i for i, col in enumerate(basis) if col >= n]]))
    if infeas > tol * (1.0 + float(np.abs(b).sum())):
        raise LpInfeasibleError(f"constraints infeasible (phase-1 residual {infeas:.3e})")

    # Pivot artificials out of the basis; rows that cannot pivot are redundant.
    keep_rows = np.ones(m, dtype=bool)
    a_basis = a1[:, basis]
    for pos in range(m):
        if basis[pos] < n:
            continue
        row = np.linalg.solve(a_basis.T, np.eye(m)[pos])
        coeffs = row @ a
        pivots = np.flatnonzero(np.abs(coeffs) > 1e-9)
        pivots = [j for j in pivots if j not in basis]
        if pivots:
            basis[pos] = int(pivots[0])
            a_basis = a1[:, basis]
        else:
            keep_rows[pos] = False
    if not np.all(keep_rows):
        rows = np.flatnonzero(keep_rows)
        a = a[rows]
        b = b[rows]
        basis = [basis[i] for i in rows]
        if len(basis) == 0:
            # Every constraint was redundant with rhs 0; origin is optimal
            # unless some objective direction is unbounded.
            if np.any(problem.objective < -tol):
                raise LpUnboundedError("objective unbounded below")
            return 0.0, np.zeros(n)
    if any(col >= n for col in basis):
        raise LpInfeasibleError("artificial variable stuck in basis")

    x_basis = _simplex_phase(a, b, c, basis, tol, max_iter)
    x = np.zeros(n)
    x[basis] = np.maximum(x_basis, 0.0)
    return float(c @ x), x
