"""
Central finite-difference complex gradients for checking closed-form gradients.

Convention: grad = 1/2 (d/dRe + j d/dIm), so for a real objective
phi(x + dx) - phi(x) ~= 2 Re(grad^H dx).
"""

import math
from typing import Callable, Optional

import numpy as np

from system.errors import InvalidInputError, NumericalError


def default_step(x: np.ndarray) -> float:
    """1e-6 * (1 + ||x||)"""
    return 1e-6 * (1.0 + float(np.linalg.norm(x)))


def _evaluate(objective: Callable[[np.ndarray], float], point: np.ndarray) -> float:
    value = float(objective(point))
    if not math.isfinite(value):
        raise NumericalError(f"objective is not finite at an offset point: {value}")
    return value


def fd_gradient(objective: Callable[[np.ndarray], float], x: np.ndarray,
                h: Optional[float] = None) -> np.ndarray:
    """Entrywise central-difference gradient of a real functional of a complex vector"""
    x = np.asarray(x, dtype=complex)
    h = default_step(x) if h is None else float(h)
    if not h > 0:
        raise InvalidInputError(f"finite-difference step must be positive, got {h}")

    grad = np.zeros(x.size, dtype=complex)
    flat = x.reshape(-1)
    for m in range(flat.size):
        e = np.zeros_like(flat)
        e[m] = h
        d_re = (_evaluate(objective, (flat + e).reshape(x.shape))
                - _evaluate(objective, (flat - e).reshape(x.shape))) / (2 * h)
        d_im = (_evaluate(objective, (flat + 1j * e).reshape(x.shape))
                - _evaluate(objective, (flat - 1j * e).reshape(x.shape))) / (2 * h)
        grad[m] = 0.5 * (d_re + 1j * d_im)
    return grad.reshape(x.shape)


def directional_derivative(objective: Callable[[np.ndarray], float], x: np.ndarray,
                           direction: np.ndarray, h: Optional[float] = None) -> float:
    """Central difference of objective along ``direction``; compare with 2 Re(grad^H d)"""
    x = np.asarray(x, dtype=complex)
    h = default_step(x) if h is None else float(h)
    return (_evaluate(objective, x + h * direction) - _evaluate(objective, x - h * direction)) / (2 * h)


def relative_error(reference: np.ndarray, candidate: np.ndarray) -> float:
    """||reference - candidate|| / max(1e-12, ||reference||)"""
    reference = np.asarray(reference)
    return float(np.linalg.norm(reference - np.asarray(candidate))
                 / max(1e-12, np.linalg.norm(reference)))
