"""
System model value types: channels, beamformers, IRS phases and rate breakdowns.

All arrays are copied on construction and marked read-only, so instances can be
shared between threads freely. Users are stored group by group: the k-th user
(0-based) of group g sits at row ``offsets[g] + k`` of the per-user arrays.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from system.errors import InvalidInputError

LN2 = math.log(2.0)


def to_bps_hz(nats):
    """Convert a rate (or array of rates) from nats/s/Hz to bps/Hz"""
    return nats / LN2


def _frozen(array, dtype=complex) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Noise-normalized channels of one realization.

    h_ts:      (M, N) Tx -> IRS matrix
    h_direct:  (K, N) Tx -> user rows
    h_irs:     (K, M) IRS -> user rows
    group_sizes: K_g for each group, sum equals K
    """
    h_ts: np.ndarray
    h_direct: np.ndarray
    h_irs: np.ndarray
    group_sizes: Tuple[int, ...]
    offsets: np.ndarray = field(init=False, repr=False)
    group_of_user: np.ndarray = field(init=False, repr=False)
    # (G, max K_g) layout: row g holds the users of group g, padding is False
    group_mask: np.ndarray = field(init=False, repr=False)
    singleton_groups: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h_ts = np.atleast_2d(np.asarray(self.h_ts, dtype=complex))
        h_direct = np.atleast_2d(np.asarray(self.h_direct, dtype=complex))
        h_irs = np.asarray(self.h_irs, dtype=complex)
        sizes = tuple(int(k) for k in self.group_sizes)

        if not sizes or any(k < 1 for k in sizes):
            raise InvalidInputError(f"group_sizes must be non-empty and positive, got {sizes}")
        num_users = sum(sizes)
        if h_direct.shape[0] != num_users:
            raise InvalidInputError(
                f"h_direct has {h_direct.shape[0]} rows but group_sizes sum to {num_users}")
        n = h_direct.shape[1]
        if h_irs.ndim == 1 and h_irs.size == 0:
            h_irs = np.zeros((num_users, 0), dtype=complex)
        h_irs = np.atleast_2d(h_irs)
        m = h_irs.shape[1]
        if h_ts.size == 0:
            h_ts = np.zeros((m, n), dtype=complex)
        if h_irs.shape[0] != num_users:
            raise InvalidInputError(
                f"h_irs has {h_irs.shape[0]} rows but group_sizes sum to {num_users}")
        if h_ts.shape != (m, n):
            raise InvalidInputError(f"h_ts must be {m}x{n}, got {h_ts.shape[0]}x{h_ts.shape[1]}")
        for name, arr in (("h_ts", h_ts), ("h_direct", h_direct), ("h_irs", h_irs)):
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains non-finite entries")

        offsets = np.concatenate(([0], np.cumsum(sizes)))
        group_of_user = np.repeat(np.arange(len(sizes)), sizes)
        group_mask = np.arange(max(sizes)) < np.array(sizes)[:, None]
        object.__setattr__(self, "h_ts", _frozen(h_ts))
        object.__setattr__(self, "h_direct", _frozen(h_direct))
        object.__setattr__(self, "h_irs", _frozen(h_irs))
        object.__setattr__(self, "group_sizes", sizes)
        object.__setattr__(self, "offsets", _frozen(offsets, dtype=int))
        object.__setattr__(self, "group_of_user", _frozen(group_of_user, dtype=int))
        object.__setattr__(self, "group_mask", _frozen(group_mask, dtype=bool))
        object.__setattr__(self, "singleton_groups", _frozen(np.array(sizes) == 1, dtype=bool))

    @property
    def n(self) -> int:
        return self.h_direct.shape[1]

    @property
    def m(self) -> int:
        return self.h_irs.shape[1]

    @property
    def num_groups(self) -> int:
        return len(self.group_sizes)

    @property
    def num_users(self) -> int:
        return self.h_direct.shape[0]

    def user_index(self, k: int, g: int) -> int:
        """Row index of user k of group g"""
        if not 0 <= g < self.num_groups:
            raise InvalidInputError(f"group index {g} out of range [0, {self.num_groups})")
        if not 0 <= k < self.group_sizes[g]:
            raise InvalidInputError(f"user index {k} out of range for group {g} (K_g={self.group_sizes[g]})")
        return int(self.offsets[g]) + k

    def group_slice(self, g: int) -> slice:
        return slice(int(self.offsets[g]), int(self.offsets[g + 1]))

    def group_grid(self, per_user: np.ndarray, fill: float) -> np.ndarray:
        """Scatter a per-user vector into the (G, max K_g) layout, padding with ``fill``"""
        grid = np.full(self.group_mask.shape, fill, dtype=float)
        grid[self.group_mask] = per_user
        return grid

    def scaled(self, factor: float) -> "ChannelSet":
        """Copy with every channel scaled by ``factor`` (cascade scales by factor^2)"""
        return ChannelSet(self.h_ts * factor, self.h_direct * factor, self.h_irs * factor,
                          self.group_sizes)


@dataclass(frozen=True, eq=False)
class BeamformerStack:
    """Stacked beamformer f = [f_1; ...; f_G], each block of length N"""
    f: np.ndarray
    num_groups: int

    def __post_init__(self):
        f = np.asarray(self.f, dtype=complex).reshape(-1)
        if self.num_groups < 1 or f.size % self.num_groups:
            raise InvalidInputError(
                f"beamformer length {f.size} is not a multiple of {self.num_groups} groups")
        if not np.all(np.isfinite(f)):
            raise InvalidInputError("beamformer contains non-finite entries")
        object.__setattr__(self, "f", _frozen(f))

    @classmethod
    def from_blocks(cls, blocks) -> "BeamformerStack":
        blocks = np.atleast_2d(np.asarray(blocks, dtype=complex))
        return cls(blocks.reshape(-1), blocks.shape[0])

    @classmethod
    def zeros(cls, n: int, num_groups: int) -> "BeamformerStack":
        return cls(np.zeros(n * num_groups, dtype=complex), num_groups)

    @property
    def n(self) -> int:
        return self.f.size // self.num_groups

    def blocks(self) -> np.ndarray:
        """(G, N) read-only view of the per-group beamformers"""
        return self.f.reshape(self.num_groups, self.n)

    def block(self, g: int) -> np.ndarray:
        return self.blocks()[g]

    def norm(self) -> float:
        return float(np.linalg.norm(self.f))

    def is_feasible(self, p_t: float, atol: float = 1e-12) -> bool:
        return self.norm() <= math.sqrt(p_t) + atol

    def with_vector(self, f) -> "BeamformerStack":
        return BeamformerStack(f, self.num_groups)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """IRS reflection vector theta, |theta_m| = 1 when feasible"""
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(theta)):
            raise InvalidInputError("phase vector contains non-finite entries")
        object.__setattr__(self, "theta", _frozen(theta))

    @classmethod
    def from_angles(cls, phi) -> "PhaseVector":
        return cls(np.exp(1j * np.asarray(phi, dtype=float)))

    @property
    def m(self) -> int:
        return self.theta.size

    def angles(self) -> np.ndarray:
        return np.mod(np.angle(self.theta), 2 * np.pi)

    def is_feasible(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.abs(self.theta) - 1.0) <= atol))


@dataclass(frozen=True, eq=False)
class RateBreakdown:
    """Per-user, per-group and sum rates in nats/s/Hz"""
    per_user_rate: np.ndarray
    per_group_rate: np.ndarray
    sum_rate: float
    group_sizes: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_user_rate", _frozen(self.per_user_rate, dtype=float))
        object.__setattr__(self, "per_group_rate", _frozen(self.per_group_rate, dtype=float))
        object.__setattr__(self, "sum_rate", float(self.sum_rate))
        object.__setattr__(self, "group_sizes", tuple(int(k) for k in self.group_sizes))

    def user(self, k: int, g: int) -> float:
        return float(self.per_user_rate[sum(self.group_sizes[:g]) + k])

    def group_users(self, g: int) -> np.ndarray:
        start = sum(self.group_sizes[:g])
        return self.per_user_rate[start:start + self.group_sizes[g]]

    def in_bps_hz(self) -> "RateBreakdown":
        return RateBreakdown(to_bps_hz(self.per_user_rate), to_bps_hz(self.per_group_rate),
                             to_bps_hz(self.sum_rate), self.group_sizes)


def check_dimensions(ch: ChannelSet, f: BeamformerStack = None, theta: PhaseVector = None):
    """Raise InvalidInputError unless f and theta fit the channel set"""
    if f is not None:
        if f.num_groups != ch.num_groups or f.n != ch.n:
            raise InvalidInputError(
                f"beamformer is {f.num_groups}x{f.n}, channels need {ch.num_groups}x{ch.n}")
    if theta is not None and theta.m != ch.m:
        raise InvalidInputError(f"phase vector has length {theta.m}, channels need {ch.m}")


def random_channel_set(rng: np.random.Generator, n: int, m: int,
                       group_sizes: Sequence[int], irs_scale: float = 1.0) -> ChannelSet:
    """CN(0,1) channel set for tests and quick experiments (no geometry)"""
    k = int(sum(group_sizes))

    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)

    return ChannelSet(cn(m, n) * irs_scale, cn(k, n), cn(k, m) * irs_scale, tuple(group_sizes))
