"""
Audit of the log-sum-exp bounds: per group,
min_k R - ln(K_g)/tau <= smoothed group rate <= min_k R.
"""

import math
from dataclasses import dataclass

import numpy as np

from optim.smoothing import SmoothingParam, compute_user_terms, smoothed_group_rates
from system.errors import SandwichViolation
from system.rates import group_minimum
from system.types import BeamformerStack, ChannelSet, PhaseVector

# Slack for round-off in the logsumexp evaluation
BOUND_SLACK = 1e-10


@dataclass(frozen=True)
class SandwichGap:
    lower_gap: float    # true minus smoothed sum rate, in [0, bound]
    upper_gap: float    # bound minus lower_gap
    bound: float        # sum_g ln(K_g) / tau


def sandwich_audit(ch: ChannelSet, f: BeamformerStack, theta: PhaseVector, tau) -> SandwichGap:
    """Check the smoothing bounds group by group; raise SandwichViolation on failure"""
    tau = tau if isinstance(tau, SmoothingParam) else SmoothingParam(float(tau))
    terms = compute_user_terms(ch, f, theta)
    true_groups = group_minimum(terms.rates, ch)
    smooth_groups = smoothed_group_rates(ch, f, theta, tau, terms)

    for g, (true_rate, smooth_rate) in enumerate(zip(true_groups, smooth_groups)):
        gap = true_rate - smooth_rate
        limit = math.log(ch.group_sizes[g]) / tau.tau
        slack = BOUND_SLACK * max(1.0, abs(true_rate))
        if gap < -slack:
            raise SandwichViolation(f"smoothed rate {smooth_rate:.12g} exceeds the minimum "
                                    f"{true_rate:.12g}", g)
        if gap > limit + slack:
            raise SandwichViolation(f"gap {gap:.12g} exceeds ln(K_g)/tau = {limit:.12g}", g)

    bound = tau.max_gap(ch.group_sizes)
    lower_gap = float(np.sum(true_groups) - np.sum(smooth_groups))
    return SandwichGap(lower_gap, bound - lower_gap, bound)
