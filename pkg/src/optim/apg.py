"""
Alternating projected gradient (APG) ascent on the smoothed multigroup sum rate.

Each iteration takes a projected gradient step on the stacked beamformer at
(f_prev, theta_prev), then a projected gradient step on the IRS phases at
(f_new, theta_prev). Step sizes come from Armijo backtracking, warm-started at
twice the previously accepted step and capped by the configured initial step.
"""

import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from optim.line_search import armijo_search
from optim.projections import normalize_modulus, project_power_ball, project_unit_modulus, scale_into_ball
from optim.smoothing import (SmoothingParam, compute_user_terms, grad_f_from_terms,
                             grad_theta_from_terms, smoothed_sum_rate, smoothed_sum_rate_at)
from system.errors import InvalidInputError
from system.rates import cascade_channels, effective_channels, group_minimum, rate_breakdown
from system.types import BeamformerStack, ChannelSet, PhaseVector, RateBreakdown, check_dimensions
from utils.logging import debug_print, info_print, warning_print

IterateCallback = Callable[[int, BeamformerStack, PhaseVector], None]


class TerminationReason(Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    STALLED = "stalled"


@dataclass(frozen=True)
class SolverOptions:
    tau: float = 50.0
    tol: float = 1e-5
    max_iters: int = 1000
    armijo_c: float = 1e-4
    shrink: float = 0.5
    alpha_init_f: float = 1e3
    alpha_init_theta: float = 1e3
    seed: int = 0
    optimize_theta: bool = True

    def __post_init__(self):
        SmoothingParam(self.tau)
        if not self.tol > 0:
            raise InvalidInputError(f"tol must be positive, got {self.tol}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidInputError(f"max_iters must be a positive integer, got {self.max_iters}")
        for name in ("armijo_c", "shrink"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise InvalidInputError(f"{name} must lie in (0, 1), got {value}")
        for name in ("alpha_init_f", "alpha_init_theta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    smoothed_objective: float   # nats/s/Hz
    true_sum_rate: float        # nats/s/Hz
    alpha_f: float
    alpha_theta: float
    wall_seconds: float         # since the start of the solve


@dataclass
class SolveTrace:
    records: List[TraceRecord] = field(default_factory=list)
    f_opt: Optional[BeamformerStack] = None
    theta_opt: Optional[PhaseVector] = None
    iterations: int = 0
    termination: Optional[TerminationReason] = None
    final_rates: Optional[RateBreakdown] = None

    def smoothed_objectives(self) -> np.ndarray:
        return np.array([r.smoothed_objective for r in self.records])

    def true_sum_rates(self) -> np.ndarray:
        return np.array([r.true_sum_rate for r in self.records])

    @property
    def total_seconds(self) -> float:
        return self.records[-1].wall_seconds if self.records else 0.0

    @property
    def seconds_per_iteration(self) -> float:
        return self.total_seconds / max(1, self.iterations)

    @property
    def final_objective(self) -> float:
        return self.records[-1].smoothed_objective

    @property
    def final_sum_rate(self) -> float:
        return self.records[-1].true_sum_rate


def initialize(ch: ChannelSet, p_t: float, seed: int) -> Tuple[BeamformerStack, PhaseVector]:
    """Random IRS phases and group-mean conjugate beamformers at full power"""
    if not p_t > 0:
        raise InvalidInputError(f"transmit power must be positive, got {p_t}")
    rng = np.random.default_rng(seed)
    theta = PhaseVector.from_angles(rng.uniform(0.0, 2 * np.pi, ch.m))
    z = effective_channels(ch, theta)

    blocks = np.empty((ch.num_groups, ch.n), dtype=complex)
    for g in range(ch.num_groups):
        mean_row = z[ch.group_slice(g)].mean(axis=0)
        if np.linalg.norm(mean_row) > 0:
            blocks[g] = np.conj(mean_row)
        else:
            warning_print(f"group {g} has an all-zero mean channel, using a random beamformer")
            blocks[g] = rng.standard_normal(ch.n) + 1j * rng.standard_normal(ch.n)

    stacked = blocks.reshape(-1)
    stacked = stacked * (math.sqrt(p_t) / np.linalg.norm(stacked))
    return BeamformerStack(stacked, ch.num_groups), theta


def _next_alpha(previous: float, cap: float) -> float:
    return cap if previous <= 0 else min(2.0 * previous, cap)


def apg_solve(ch: ChannelSet, opts: SolverOptions, p_t: float,
              initial: Optional[Tuple[BeamformerStack, PhaseVector]] = None,
              callback: Optional[IterateCallback] = None) -> SolveTrace:
    """Run the alternating projected gradient loop and return its full trace.

    ``callback(iteration, f, theta)`` sees the starting point (iteration 0)
    and every accepted iterate.
    """
    if not p_t > 0:
        raise InvalidInputError(f"transmit power must be positive, got {p_t}")
    if initial is None:
        f, theta = initialize(ch, p_t, opts.seed)
    else:
        f, theta = initial
        check_dimensions(ch, f, theta)
        f = project_power_ball(f, p_t)
        theta = project_unit_modulus(theta)

    tau = opts.tau
    shape = (ch.num_groups, ch.n)
    start = time.perf_counter()
    z = effective_channels(ch, theta)
    terms = compute_user_terms(ch, f, theta, z)
    objective = smoothed_sum_rate(ch, f, theta, tau, terms)
    trace = SolveTrace()
    trace.records.append(TraceRecord(0, objective, float(group_minimum(terms.rates, ch).sum()),
                                     0.0, 0.0, 0.0))
    if callback is not None:
        callback(0, f, theta)

    alpha_f = alpha_theta = 0.0
    reason = TerminationReason.MAX_ITERS
    iteration = 0
    for iteration in range(1, opts.max_iters + 1):
        # f-step at (f_prev, theta_prev)
        z_now = z
        grad_f = grad_f_from_terms(ch, terms, tau)
        step_f = armijo_search(lambda v: smoothed_sum_rate_at(ch, z_now, v.reshape(shape), tau),
                               f.f, grad_f, lambda v: scale_into_ball(v, p_t),
                               _next_alpha(alpha_f, opts.alpha_init_f),
                               opts.armijo_c, opts.shrink, obj_x=objective)
        if not step_f.stalled:
            f = f.with_vector(step_f.x_next)
        new_objective = step_f.obj_next

        # theta-step at (f_new, theta_prev)
        step_theta = None
        if opts.optimize_theta and ch.m > 0:
            f_blocks = f.blocks()
            terms = compute_user_terms(ch, f, theta, z)
            grad_theta = grad_theta_from_terms(ch, f, terms, tau)
            step_theta = armijo_search(
                lambda v: smoothed_sum_rate_at(ch, cascade_channels(ch, v), f_blocks, tau),
                theta.theta, grad_theta, normalize_modulus,
                _next_alpha(alpha_theta, opts.alpha_init_theta),
                opts.armijo_c, opts.shrink, obj_x=new_objective)
            if not step_theta.stalled:
                theta = PhaseVector(step_theta.x_next)
                z = cascade_channels(ch, theta.theta)
            new_objective = step_theta.obj_next

        alpha_f = step_f.alpha
        alpha_theta = step_theta.alpha if step_theta is not None else 0.0
        terms = compute_user_terms(ch, f, theta, z)
        true_rate = float(group_minimum(terms.rates, ch).sum())
        trace.records.append(TraceRecord(iteration, new_objective, true_rate, alpha_f,
                                         alpha_theta, time.perf_counter() - start))
        if callback is not None:
            callback(iteration, f, theta)
        debug_print(f"apg iter {iteration}: smoothed={new_objective:.8f} true={true_rate:.8f} "
                    f"alpha_f={alpha_f:.3e} alpha_theta={alpha_theta:.3e}")

        relative_change = abs(new_objective - objective) / max(1.0, abs(objective))
        objective = new_objective
        theta_stalled = step_theta is None or step_theta.stalled
        if step_f.stalled and theta_stalled:
            reason = TerminationReason.STALLED
            break
        if relative_change < opts.tol:
            reason = TerminationReason.CONVERGED
            break

    trace.f_opt = f
    trace.theta_opt = theta
    trace.iterations = iteration
    trace.termination = reason
    trace.final_rates = rate_breakdown(ch, f, theta, z)
    info_print(f"apg {reason.value} after {iteration} iterations: smoothed={objective:.6f} "
               f"true={trace.final_rates.sum_rate:.6f} nats/s/Hz")
    return trace
