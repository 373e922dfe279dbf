"""
Scalar-loop recomputation of the rate breakdown for small instances.

Deliberately shares no code with the vectorized model: every |z f|^2 is formed
by explicit loops over antennas and IRS tiles on Python complex numbers.
"""

import math

from system.errors import InvalidInputError
from system.types import BeamformerStack, ChannelSet, PhaseVector, RateBreakdown

MAX_BRUTE_FORCE_USERS = 16


def _effective_channel_loops(ch: ChannelSet, theta: PhaseVector, u: int):
    z = []
    for n in range(ch.n):
        value = complex(ch.h_direct[u, n])
        for m in range(ch.m):
            value += complex(ch.h_irs[u, m]) * complex(theta.theta[m]) * complex(ch.h_ts[m, n])
        z.append(value)
    return z


def _received_power(z, f: BeamformerStack, g: int) -> float:
    acc = 0j
    for n in range(len(z)):
        acc += z[n] * complex(f.f[g * len(z) + n])
    return acc.real * acc.real + acc.imag * acc.imag


def brute_min_group_rate(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector) -> RateBreakdown:
    """Rate breakdown from triple loops; limited to K <= 16 users"""
    if ch.num_users > MAX_BRUTE_FORCE_USERS:
        raise InvalidInputError(
            f"brute-force oracle supports at most {MAX_BRUTE_FORCE_USERS} users, got {ch.num_users}")
    if f.f.size != ch.n * ch.num_groups or theta.theta.size != ch.m:
        raise InvalidInputError("beamformer or phase vector does not fit the channel set")

    per_user = []
    per_group = []
    u = 0
    for g, size in enumerate(ch.group_sizes):
        group_min = math.inf
        for _ in range(size):
            z = _effective_channel_loops(ch, theta, u)
            signal = _received_power(z, f, g)
            interference = 0.0
            for other in range(ch.num_groups):
                if other != g:
                    interference += _received_power(z, f, other)
            rate = math.log(1.0 + signal / (1.0 + interference))
            per_user.append(rate)
            group_min = min(group_min, rate)
            u += 1
        per_group.append(group_min)
    return RateBreakdown(per_user, per_group, math.fsum(per_group), ch.group_sizes)
