"""
Deployment geometry and link budget of the simulated IRS-aided downlink.

Defaults: Tx ULA centred at (0, 20, 10) m, IRS UPA centred at (30, 0, 5) m,
users uniform on a disk of radius 20 m centred at (350, 50, 2) m, 2 GHz carrier,
half-wavelength element spacing, users at least two wavelengths apart,
-174 dBm/Hz noise over 10 MHz.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from system.errors import ConfigurationError
from utils.logging import debug_print

SPEED_OF_LIGHT = 3e8
MAX_PLACEMENT_ATTEMPTS = 10_000

Point = Tuple[float, float, float]
SeedLike = Union[int, np.random.SeedSequence]


class LinkClass(Enum):
    TX_IRS = "tx_irs"
    IRS_USER = "irs_user"
    TX_USER = "tx_user"


@dataclass(frozen=True)
class GeometryConfig:
    tx_center: Point = (0.0, 20.0, 10.0)
    irs_center: Point = (30.0, 0.0, 5.0)
    user_area_center: Point = (350.0, 50.0, 2.0)
    user_area_radius: float = 20.0
    carrier_hz: float = 2e9
    element_spacing: Optional[float] = None       # defaults to half a wavelength
    min_user_separation: Optional[float] = None   # defaults to two wavelengths

    def __post_init__(self):
        for name in ("tx_center", "irs_center", "user_area_center"):
            point = tuple(float(c) for c in getattr(self, name))
            if len(point) != 3 or not all(math.isfinite(c) for c in point):
                raise ConfigurationError(f"{name} must be a finite 3-D point, got {point}")
            object.__setattr__(self, name, point)
        if not (math.isfinite(self.carrier_hz) and self.carrier_hz > 0):
            raise ConfigurationError(f"carrier_hz must be positive, got {self.carrier_hz}")
        if not self.user_area_radius > 0:
            raise ConfigurationError(f"user_area_radius must be positive, got {self.user_area_radius}")
        if self.element_spacing is None:
            object.__setattr__(self, "element_spacing", self.wavelength / 2)
        if self.min_user_separation is None:
            object.__setattr__(self, "min_user_separation", 2 * self.wavelength)
        if not self.element_spacing > 0:
            raise ConfigurationError(f"element_spacing must be positive, got {self.element_spacing}")
        if self.min_user_separation < 0:
            raise ConfigurationError(
                f"min_user_separation must be non-negative, got {self.min_user_separation}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


def _default_intercepts() -> Dict[str, float]:
    return {LinkClass.TX_IRS.value: 35.6, LinkClass.IRS_USER.value: 35.6,
            LinkClass.TX_USER.value: 32.6}


def _default_exponents() -> Dict[str, float]:
    return {LinkClass.TX_IRS.value: 2.2, LinkClass.IRS_USER.value: 2.2,
            LinkClass.TX_USER.value: 3.67}


def _default_rician() -> Dict[str, float]:
    # -inf dB is a zero Rician factor (Rayleigh)
    return {LinkClass.TX_IRS.value: 10.0, LinkClass.IRS_USER.value: 10.0,
            LinkClass.TX_USER.value: -math.inf}


@dataclass(frozen=True)
class LinkBudget:
    """Noise level and per-link-class path loss PL(d) = intercept + 10 * exponent * log10(d)"""
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 10e6
    pathloss_intercepts_db: Dict[str, float] = field(default_factory=_default_intercepts)
    pathloss_exponents: Dict[str, float] = field(default_factory=_default_exponents)
    rician_k_db: Dict[str, float] = field(default_factory=_default_rician)

    def __post_init__(self):
        if not (math.isfinite(self.bandwidth_hz) and self.bandwidth_hz > 0):
            raise ConfigurationError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")
        for name in ("pathloss_intercepts_db", "pathloss_exponents", "rician_k_db"):
            table = getattr(self, name)
            missing = [link.value for link in LinkClass if link.value not in table]
            if missing:
                raise ConfigurationError(f"{name} is missing link classes {missing}")

    def pathloss_db(self, link: LinkClass, distance) -> np.ndarray:
        distance = np.asarray(distance, dtype=float)
        return (self.pathloss_intercepts_db[link.value]
                + 10.0 * self.pathloss_exponents[link.value] * np.log10(distance))

    def amplitude(self, link: LinkClass, distance) -> np.ndarray:
        """Large-scale amplitude gain 10^(-PL/20)"""
        return 10.0 ** (-self.pathloss_db(link, distance) / 20.0)

    def rician_factor(self, link: LinkClass) -> float:
        """Linear Rician factor kappa"""
        return float(10.0 ** (self.rician_k_db[link.value] / 10.0))

    def noise_power_watts(self) -> float:
        return 10.0 ** ((noise_power_dbm(self) - 30.0) / 10.0)


def noise_power_dbm(budget: LinkBudget) -> float:
    """Total noise power over the bandwidth in dBm"""
    if not budget.bandwidth_hz > 0:
        raise ConfigurationError(f"bandwidth_hz must be positive, got {budget.bandwidth_hz}")
    return budget.noise_psd_dbm_hz + 10.0 * math.log10(budget.bandwidth_hz)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True, eq=False)
class NodePositions:
    tx: np.ndarray      # (3,)
    irs: np.ndarray     # (3,)
    users: np.ndarray   # (K, 3)


def _sample_disk(rng: np.random.Generator, center: Point, radius: float) -> np.ndarray:
    r = radius * math.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2 * math.pi)
    return np.array([center[0] + r * math.cos(angle), center[1] + r * math.sin(angle), center[2]])


def place_nodes(geom: GeometryConfig, group_sizes: Sequence[int], seed: SeedLike) -> NodePositions:
    """Fixed Tx/IRS positions and users uniform on the disk, pairwise >= min separation"""
    rng = np.random.default_rng(seed)
    total = int(sum(group_sizes))
    users = []
    attempts = 0
    while len(users) < total:
        attempts += 1
        if attempts > MAX_PLACEMENT_ATTEMPTS:
            raise ConfigurationError(
                f"could not place {total} users {geom.min_user_separation:.3f} m apart on a "
                f"disk of radius {geom.user_area_radius} m after {MAX_PLACEMENT_ATTEMPTS} attempts")
        candidate = _sample_disk(rng, geom.user_area_center, geom.user_area_radius)
        if users and np.min(np.linalg.norm(np.array(users) - candidate, axis=1)) < geom.min_user_separation:
            continue
        users.append(candidate)
    debug_print(f"placed {total} users in {attempts} draws")
    return NodePositions(np.array(geom.tx_center), np.array(geom.irs_center),
                         np.array(users).reshape(total, 3))


def irs_shape(m: int) -> Tuple[int, int]:
    """(rows, cols) of the IRS: square UPA for perfect squares, else a 1 x M ULA"""
    side = math.isqrt(m)
    return (side, side) if side * side == m else (1, m)


def _centered_offsets(count: int, spacing: float) -> np.ndarray:
    return (np.arange(count) - (count - 1) / 2.0) * spacing


def tx_element_offsets(n: int, spacing: float) -> np.ndarray:
    """(N, 3) offsets of the Tx ULA, laid along the y axis"""
    offsets = np.zeros((n, 3))
    offsets[:, 1] = _centered_offsets(n, spacing)
    return offsets


def irs_element_offsets(m: int, spacing: float) -> np.ndarray:
    """(M, 3) offsets of the IRS elements in the x-z plane, row-major"""
    rows, cols = irs_shape(m) if m > 0 else (0, 0)
    offsets = np.zeros((rows * cols, 3))
    if m == 0:
        return offsets
    xs = _centered_offsets(cols, spacing)
    zs = _centered_offsets(rows, spacing)
    offsets[:, 0] = np.tile(xs, rows)
    offsets[:, 2] = np.repeat(zs, cols)
    return offsets
