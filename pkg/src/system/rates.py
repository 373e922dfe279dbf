"""
Exact (unsmoothed) rate computations of the IRS-aided multigroup multicast model.

The effective channel of user (k, g) is z = h_direct + h_irs diag(theta) h_ts,
computed without forming diag(theta). Channels are noise-normalized, so the
noise term in every SINR is exactly 1. Rates are in nats/s/Hz.
"""

import numpy as np

from system.errors import InvalidInputError
from system.types import (BeamformerStack, ChannelSet, PhaseVector, RateBreakdown,
                          check_dimensions)


def cascade_channels(ch: ChannelSet, theta: np.ndarray) -> np.ndarray:
    """Effective channels for a raw phase array, without validation"""
    return ch.h_direct + (ch.h_irs * theta) @ ch.h_ts


def effective_channels(ch: ChannelSet, theta: PhaseVector) -> np.ndarray:
    """(K, N) matrix whose rows are the effective channels of all users"""
    check_dimensions(ch, theta=theta)
    return cascade_channels(ch, theta.theta)


def effective_channel(ch: ChannelSet, theta: PhaseVector, k: int, g: int) -> np.ndarray:
    """Effective channel row (length N) of user k in group g"""
    check_dimensions(ch, theta=theta)
    u = ch.user_index(k, g)
    return ch.h_direct[u] + (ch.h_irs[u] * theta.theta) @ ch.h_ts


def received_powers(z: np.ndarray, f: BeamformerStack) -> np.ndarray:
    """(K, G) matrix of |z_u f_g|^2"""
    return np.abs(z @ f.blocks().T) ** 2


def rates_from_powers(powers: np.ndarray, group_of_user: np.ndarray) -> np.ndarray:
    """Per-user rates ln(1 + |z f_g|^2 / (1 + sum_{l != g} |z f_l|^2))"""
    signal = powers[np.arange(powers.shape[0]), group_of_user]
    interference = powers.sum(axis=1) - signal
    return np.log1p(signal / (1.0 + interference))


def user_rate(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, k: int, g: int) -> float:
    """Achievable rate of user k in group g, in nats/s/Hz"""
    check_dimensions(ch, f, theta)
    z = effective_channel(ch, theta, k, g)
    zf = f.blocks() @ z
    powers = np.abs(zf) ** 2
    interference = powers.sum() - powers[g]
    return float(np.log1p(powers[g] / (1.0 + interference)))


def group_minimum(per_user: np.ndarray, ch: ChannelSet) -> np.ndarray:
    """Per-group minimum of a per-user quantity"""
    return np.minimum.reduceat(per_user, ch.offsets[:-1])


def rate_breakdown(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector,
                   z: np.ndarray = None) -> RateBreakdown:
    """Per-user rates, per-group minimum rates and their sum.

    ``z`` may carry precomputed effective channels for this theta.
    """
    check_dimensions(ch, f, theta)
    if z is None:
        z = effective_channels(ch, theta)
    elif z.shape != (ch.num_users, ch.n):
        raise InvalidInputError(f"cached effective channels have shape {z.shape}")
    per_user = rates_from_powers(received_powers(z, f), ch.group_of_user)
    per_group = group_minimum(per_user, ch)
    return RateBreakdown(per_user, per_group, per_group.sum(), ch.group_sizes)
