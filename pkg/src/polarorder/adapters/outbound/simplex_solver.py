# src/polarorder/adapters/outbound/simplex_solver.py
from typing import Any, Dict

import numpy as np
from loguru import logger

from polarorder.core.errors import SolverIterationLimitError
from .base import FeasibilityResult, FeasibilitySolver


class SimplexFeasibilitySolver(FeasibilitySolver):
    """
    Phase-1 simplex on a dense tableau. Every equality row gets an artificial
    variable and the sum of artificials is minimized under Bland's rule (lowest
    entering index, lowest basic index on ratio ties), which cannot cycle. The
    system is feasible iff that minimum is within `tol` of zero.
    """

    def __init__(self, config: Dict[str, Any]):
        solver_config = config.get("ordering", {}).get("solver", {})
        self.max_iterations = int(solver_config.get("max_iterations", 50_000))
        self.tol = float(solver_config.get("tol", 1e-9))
        self.pivot_tol = float(solver_config.get("pivot_tol", 1e-12))
        logger.debug(
            f"SimplexFeasibilitySolver initialized. Max iterations: {self.max_iterations}, "
            f"tolerance: {self.tol}"
        )

    def find_feasible_point(self, a_eq: np.ndarray, b_eq: np.ndarray) -> FeasibilityResult:
        a = np.array(a_eq, dtype=np.float64)
        b = np.array(b_eq, dtype=np.float64)
        m, n = a.shape
        if b.shape != (m,):
            raise ValueError(f"right-hand side has shape {b.shape}, expected ({m},)")

        flip = b < 0
        a[flip] *= -1.0
        b[flip] *= -1.0

        tableau = np.zeros((m + 1, n + m + 1))
        tableau[:m, :n] = a
        tableau[:m, n:n + m] = np.eye(m)
        tableau[:m, -1] = b
        tableau[m, :n] = -a.sum(axis=0)
        tableau[m, -1] = -b.sum()
        basis = np.arange(n, n + m)

        iterations = 0
        while True:
            entering = np.flatnonzero(tableau[m, :n + m] < -self.pivot_tol)
            if entering.size == 0:
                break
            if iterations >= self.max_iterations:
                raise SolverIterationLimitError(
                    f"simplex did not terminate within {self.max_iterations} pivots "
                    f"({m} constraints, {n} variables)"
                )
            col = int(entering[0])
            column = tableau[:m, col]
            rows = np.flatnonzero(column > self.pivot_tol)
            if rows.size == 0:
                logger.warning(f"Column {col} has no positive pivot; stopping phase 1 early.")
                break
            ratios = tableau[rows, -1] / column[rows]
            ties = rows[ratios <= ratios.min() + self.pivot_tol]
            row = int(ties[np.argmin(basis[ties])])
            self._pivot(tableau, row, col)
            basis[row] = col
            iterations += 1

        solution = np.zeros(n + m)
        solution[basis] = tableau[:m, -1]
        infeasibility = float(np.abs(solution[n:]).sum())
        x = np.maximum(solution[:n], 0.0)
        feasible = infeasibility <= self.tol
        logger.debug(
            f"Phase 1 finished after {iterations} pivots: residual {infeasibility:.3e}, "
            f"feasible={feasible}"
        )
        return FeasibilityResult(
            feasible=feasible,
            x=x if feasible else None,
            infeasibility=infeasibility,
            iterations=iterations,
        )

    @staticmethod
    def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
        tableau[row] /= tableau[row, col]
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, tableau[row])
        rhs = tableau[:-1, -1]
        rhs[(rhs < 0) & (rhs > -1e-13)] = 0.0
