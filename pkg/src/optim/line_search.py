"""
Armijo backtracking for projected gradient ascent.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from system.errors import InvalidInputError, NumericalError
from utils.logging import trace_print

ALPHA_MIN = 1e-12


@dataclass(frozen=True, eq=False)
class LineSearchResult:
    alpha: float            # accepted step, 0.0 when the search stalled
    x_next: np.ndarray
    obj_next: float
    evaluations: int

    @property
    def stalled(self) -> bool:
        return self.alpha == 0.0


def armijo_search(objective: Callable[[np.ndarray], float], x: np.ndarray, grad: np.ndarray,
                  project: Callable[[np.ndarray], np.ndarray], alpha_init: float,
                  c: float = 1e-4, shrink: float = 0.5, alpha_min: float = ALPHA_MIN,
                  obj_x: Optional[float] = None) -> LineSearchResult:
    """Largest alpha in {alpha_init * shrink^i} with sufficient projected increase.

    Accepts x+ = project(x + alpha * grad) once
    objective(x+) >= objective(x) + (c / alpha) * ||x+ - x||^2.
    Returns x unchanged with alpha = 0 when no alpha >= alpha_min qualifies.
    """
    if not alpha_init > 0:
        raise InvalidInputError(f"alpha_init must be positive, got {alpha_init}")
    if not (0 < c < 1 and 0 < shrink < 1):
        raise InvalidInputError(f"armijo constants must lie in (0, 1), got c={c}, shrink={shrink}")

    if obj_x is None:
        obj_x = objective(x)
    if not math.isfinite(obj_x):
        raise NumericalError(f"objective is not finite at the line-search origin: {obj_x}")

    alpha = float(alpha_init)
    evaluations = 0
    while alpha >= alpha_min:
        candidate = project(x + alpha * grad)
        value = objective(candidate)
        evaluations += 1
        if not math.isfinite(value):
            raise NumericalError(f"objective turned non-finite at step {alpha:.3e}: {value}")
        step = candidate - x
        step_sq = float(np.vdot(step, step).real)
        trace_print(f"armijo trial alpha={alpha:.3e} obj={value:.10g} step^2={step_sq:.3e}")
        if value >= obj_x + (c / alpha) * step_sq:
            return LineSearchResult(alpha, candidate, value, evaluations)
        alpha *= shrink

    return LineSearchResult(0.0, np.array(x, copy=True), obj_x, evaluations)
