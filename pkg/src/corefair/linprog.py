"""Thin deterministic wrapper around scipy's HiGHS linear programming."""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import ConvergenceError, InfeasibleError, UnboundedError


@dataclass
class LinearProgram:
    """A bounded LP in inequality form with optional box bounds.

    ``sense`` is "max" or "min". Variables default to the [0, 1] box; pass
    explicit ``bounds`` (a list of (low, high) pairs, None for free) to
    override.
    """

    objective: np.ndarray
    sense: str = "max"
    A_ub: np.ndarray = None
    b_ub: np.ndarray = None
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    bounds: object = (0.0, 1.0)


@dataclass
class LpSolution:
    value: float
    x: np.ndarray


def solve_lp(lp):
    """Solve the program, reporting infeasible and unbounded distinctly."""
    c = np.asarray(lp.objective, dtype=float)
    sign = -1.0 if lp.sense == "max" else 1.0
    res = linprog(
        sign * c,
        A_ub=lp.A_ub,
        b_ub=lp.b_ub,
        A_eq=lp.A_eq,
        b_eq=lp.b_eq,
        bounds=lp.bounds,
        method="highs",
    )
    if res.status == 2:
        raise InfeasibleError("linear program is infeasible")
    if res.status == 3:
        raise UnboundedError("linear program is unbounded")
    if res.status != 0:
        raise ConvergenceError(f"linear program failed: {res.message}")
    return LpSolution(value=float(sign * res.fun), x=np.asarray(res.x))
