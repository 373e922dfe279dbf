"""
Log-sum-exp smoothed sum rate and its closed-form complex gradients.

Gradients follow the conjugate-coordinate convention
grad = 1/2 (d/dRe + j d/dIm), so for a real objective df ~= 2 Re(grad^H dx)
and x + alpha * grad is an ascent step.

Every quantity is assembled from a shared per-user cache (effective channels,
z f_g products, received powers), so one evaluation costs O(KMN) for the
effective channels plus O(KGN) for the products, and the theta-gradient costs
O(MGN + KGM) without forming any M x M matrix.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import logsumexp, softmax

from system.errors import InvalidInputError
from system.rates import (effective_channel, effective_channels, rates_from_powers,
                          rate_breakdown)
from system.types import BeamformerStack, ChannelSet, PhaseVector, check_dimensions


@dataclass(frozen=True)
class SmoothingParam:
    """Sharpness tau of the soft minimum; larger tau hugs the true minimum"""
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise InvalidInputError(f"tau must be a positive finite number, got {self.tau}")

    def max_gap(self, group_sizes) -> float:
        """Upper bound sum_g ln(K_g) / tau on true minus smoothed sum rate"""
        return float(sum(math.log(k) for k in group_sizes) / self.tau)


def _tau_value(tau) -> float:
    return tau.tau if isinstance(tau, SmoothingParam) else SmoothingParam(float(tau)).tau


@dataclass(frozen=True, eq=False)
class GradientPair:
    grad_f: np.ndarray
    grad_theta: np.ndarray
    num_groups: int

    def __post_init__(self):
        if not (np.all(np.isfinite(self.grad_f)) and np.all(np.isfinite(self.grad_theta))):
            raise InvalidInputError("gradient contains non-finite entries")
        if self.grad_f.size % self.num_groups:
            raise InvalidInputError("grad_f length does not match the group block structure")

    def blocks(self) -> np.ndarray:
        return self.grad_f.reshape(self.num_groups, -1)


@dataclass(frozen=True, eq=False)
class UserTerms:
    """Per-user quantities shared by the objective and both gradients.

    z:     (K, N) effective channels
    zf:    (K, G) products z_u f_g
    power: (K, G) |z_u f_g|^2
    total: (K,)   sum_g |z_u f_g|^2 (received power, own group included)
    interference: (K,) total minus the own-group term
    rates: (K,)   per-user rates in nats
    """
    z: np.ndarray
    zf: np.ndarray
    power: np.ndarray
    total: np.ndarray
    interference: np.ndarray
    rates: np.ndarray
    group_of_user: np.ndarray = field(repr=False)


def compute_user_terms(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector,
                       z: Optional[np.ndarray] = None) -> UserTerms:
    """Build the per-user cache; pass ``z`` to reuse effective channels for this theta"""
    check_dimensions(ch, f, theta)
    if z is None:
        z = effective_channels(ch, theta)
    zf = z @ f.blocks().T
    power = np.abs(zf) ** 2
    total = power.sum(axis=1)
    own = power[np.arange(ch.num_users), ch.group_of_user]
    rates = rates_from_powers(power, ch.group_of_user)
    return UserTerms(z, zf, power, total, total - own, rates, ch.group_of_user)


def soft_minimum(rates: np.ndarray, ch: ChannelSet, tau: float) -> np.ndarray:
    """Per-group -(1/tau) ln sum_k exp(-tau R_{k,g}), all groups in one logsumexp call.

    Padding entries are -inf exponents and drop out; singleton groups return
    their rate exactly.
    """
    exponents = ch.group_grid(-tau * rates, -np.inf)
    values = -logsumexp(exponents, axis=1) / tau
    return np.where(ch.singleton_groups, rates[ch.offsets[:-1]], values)


def softmin_weights(rates: np.ndarray, ch: ChannelSet, tau) -> np.ndarray:
    """exp(-tau R_u) normalized within each group (weights sum to 1 per group)"""
    tau = _tau_value(tau)
    return softmax(ch.group_grid(-tau * rates, -np.inf), axis=1)[ch.group_mask]


def smoothed_group_rates(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau,
                         terms: Optional[UserTerms] = None) -> np.ndarray:
    """Per-group soft minimum -(1/tau) ln sum_k exp(-tau R_{k,g})"""
    tau = _tau_value(tau)
    terms = terms or compute_user_terms(ch, f, theta)
    return soft_minimum(terms.rates, ch, tau)


def smoothed_sum_rate(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau,
                      terms: Optional[UserTerms] = None) -> float:
    """Smoothed multigroup sum rate in nats/s/Hz"""
    return float(smoothed_group_rates(ch, f, theta, tau, terms).sum())


def smoothed_sum_rate_at(ch: ChannelSet, z: np.ndarray, f_blocks: np.ndarray, tau: float) -> float:
    """Smoothed sum rate from effective channels and (G, N) beamformer blocks.

    Skips all validation; used by the line search on already checked inputs.
    """
    power = np.abs(z @ f_blocks.T) ** 2
    return float(soft_minimum(rates_from_powers(power, ch.group_of_user), ch, tau).sum())


def grad_user_rate_own(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector,
                       k: int, i: int) -> np.ndarray:
    """Gradient of R_{k,i} w.r.t. its own group's beamformer f_i.

    z^H (z f_i) / (1 + sum_g |z f_g|^2); the denominator is the total received
    power, own group included.
    """
    check_dimensions(ch, f, theta)
    u = ch.user_index(k, i)
    z = effective_channels(ch, theta)[u]
    zf = f.blocks() @ z
    return np.conj(z) * zf[i] / (1.0 + np.sum(np.abs(zf) ** 2))


def grad_user_rate_cross(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector,
                         k: int, l: int, i: int) -> np.ndarray:
    """Gradient of R_{k,l} (user k of group l) w.r.t. another group's beamformer f_i"""
    check_dimensions(ch, f, theta)
    if l == i:
        raise InvalidInputError("cross gradient needs distinct victim and interfering groups")
    if not 0 <= i < ch.num_groups:
        raise InvalidInputError(f"group index {i} out of range [0, {ch.num_groups})")
    u = ch.user_index(k, l)
    z = effective_channels(ch, theta)[u]
    zf = f.blocks() @ z
    power = np.abs(zf) ** 2
    total = power.sum()
    interference = total - power[l]
    # <= 0: more power on f_i only hurts group l
    bracket = 1.0 / (1.0 + total) - 1.0 / (1.0 + interference)
    return bracket * np.conj(z) * zf[i]


def _f_coefficients(terms: UserTerms, weights: np.ndarray, num_groups: int) -> np.ndarray:
    """(K, G) scalar c_{u,i} with grad_{f_i} = sum_u c_{u,i} (z_u f_i) conj(z_u)"""
    inv_total = 1.0 / (1.0 + terms.total)
    inv_interference = 1.0 / (1.0 + terms.interference)
    own = terms.group_of_user[:, None] == np.arange(num_groups)
    coeff = np.where(own, inv_total[:, None], (inv_total - inv_interference)[:, None])
    return weights[:, None] * coeff


def grad_f_from_terms(ch: ChannelSet, terms: UserTerms, tau: float) -> np.ndarray:
    weights = softmin_weights(terms.rates, ch, tau)
    coeff = _f_coefficients(terms, weights, ch.num_groups)
    blocks = np.einsum("ui,un->in", coeff * terms.zf, np.conj(terms.z))
    return blocks.reshape(-1)


def grad_f_smoothed(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau,
                    terms: Optional[UserTerms] = None) -> np.ndarray:
    """Gradient (length N*G) of the smoothed sum rate w.r.t. the stacked beamformer"""
    tau = _tau_value(tau)
    terms = terms or compute_user_terms(ch, f, theta)
    return grad_f_from_terms(ch, terms, tau)


def grad_theta_quadratic(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector,
                         k: int, g: int, j: int) -> np.ndarray:
    """Gradient of |z_{k,g} f_j|^2 w.r.t. theta.

    Diagonal of conj(h_irs)^T (z f_j) (f_j^H h_ts^H), taken elementwise.
    """
    check_dimensions(ch, f, theta)
    u = ch.user_index(k, g)
    if not 0 <= j < ch.num_groups:
        raise InvalidInputError(f"group index {j} out of range [0, {ch.num_groups})")
    fj = f.block(j)
    z = effective_channel(ch, theta, k, g)
    return np.conj(ch.h_irs[u]) * (z @ fj) * np.conj(ch.h_ts @ fj)


def grad_theta_from_terms(ch: ChannelSet, f: BeamformerStack, terms: UserTerms,
                          tau: float) -> np.ndarray:
    if ch.m == 0:
        return np.zeros(0, dtype=complex)
    weights = softmin_weights(terms.rates, ch, tau)
    inv_total = 1.0 / (1.0 + terms.total)
    inv_interference = 1.0 / (1.0 + terms.interference)
    own = ch.group_of_user[:, None] == np.arange(ch.num_groups)
    # Interference sum excludes the user's own group
    coeff = inv_total[:, None] - np.where(own, 0.0, inv_interference[:, None])
    coeff = weights[:, None] * coeff * terms.zf               # (K, G)
    hf = ch.h_ts @ f.blocks().T                               # (M, G)
    per_user = coeff @ np.conj(hf).T                          # (K, M)
    return np.sum(np.conj(ch.h_irs) * per_user, axis=0)


def grad_theta_smoothed(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau,
                        terms: Optional[UserTerms] = None) -> np.ndarray:
    """Gradient (length M) of the smoothed sum rate w.r.t. the IRS phase vector"""
    tau = _tau_value(tau)
    terms = terms or compute_user_terms(ch, f, theta)
    return grad_theta_from_terms(ch, f, terms, tau)


def smoothed_gradients(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau,
                       terms: Optional[UserTerms] = None) -> GradientPair:
    """Both gradients from a single per-user cache"""
    tau = _tau_value(tau)
    terms = terms or compute_user_terms(ch, f, theta)
    return GradientPair(grad_f_from_terms(ch, terms, tau),
                        grad_theta_from_terms(ch, f, terms, tau), ch.num_groups)


def smoothing_gap(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau) -> float:
    """True minus smoothed sum rate at (f, theta); lies in [0, sum_g ln K_g / tau]"""
    terms = compute_user_terms(ch, f, theta)
    return rate_breakdown(ch, f, theta, z=terms.z).sum_rate - smoothed_sum_rate(
        ch, f, theta, tau, terms)
