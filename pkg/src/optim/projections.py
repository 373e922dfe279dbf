"""
Euclidean projections onto the transmit-power ball and the unit-modulus torus.
"""

import math

import numpy as np

from system.errors import InvalidInputError
from system.types import BeamformerStack, PhaseVector


def scale_into_ball(vector: np.ndarray, p_t: float) -> np.ndarray:
    """sqrt(p_t) * v / max(||v||, sqrt(p_t))"""
    if not p_t > 0:
        raise InvalidInputError(f"transmit power must be positive, got {p_t}")
    radius = math.sqrt(p_t)
    norm = float(np.linalg.norm(vector))
    if norm <= radius:
        return np.array(vector, dtype=complex)
    return vector * (radius / norm)


def project_power_ball(f_hat: BeamformerStack, p_t: float) -> BeamformerStack:
    """Closest point of {f : ||f|| <= sqrt(p_t)}; interior points are returned unchanged"""
    return f_hat.with_vector(scale_into_ball(f_hat.f, p_t))


def normalize_modulus(values: np.ndarray) -> np.ndarray:
    """Entrywise v / |v|, zero entries mapped to 1 + 0j (phase 0)"""
    values = np.asarray(values, dtype=complex)
    magnitude = np.abs(values)
    return np.divide(values, magnitude, out=np.ones_like(values), where=magnitude > 0)


def project_unit_modulus(theta_hat: PhaseVector) -> PhaseVector:
    """Closest point with |theta_m| = 1 for every m"""
    return PhaseVector(normalize_modulus(theta_hat.theta))
