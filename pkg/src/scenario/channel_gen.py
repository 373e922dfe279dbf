"""
Seeded channel realizations: path loss, Rician small-scale fading with
steering-vector line-of-sight components, and noise normalization.

Realization r of seed s draws from its own substream SeedSequence([s, r]), so
realizations are reproducible individually and can be generated in any order
or in parallel.
"""

from typing import Sequence

import numpy as np

from scenario.geometry import (GeometryConfig, LinkBudget, LinkClass, NodePositions, irs_element_offsets,
                               place_nodes, tx_element_offsets)
from system.errors import ConfigurationError
from system.types import ChannelSet
from utils.logging import trace_print


def realization_seed(seed: int, realization: int) -> np.random.SeedSequence:
    """Independent substream for one Monte-Carlo realization"""
    return np.random.SeedSequence([int(seed), int(realization)])


def steering_vector(offsets: np.ndarray, direction: np.ndarray, wavelength: float) -> np.ndarray:
    """Far-field array response exp(j 2 pi / lambda * p_i . u) toward unit vector u"""
    return np.exp(1j * 2 * np.pi / wavelength * (offsets @ direction))


def _unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


def los_component(rx_offsets: np.ndarray, rx_pos: np.ndarray, tx_offsets: np.ndarray,
                  tx_pos: np.ndarray, wavelength: float) -> np.ndarray:
    """(n_rx, n_tx) unit-modulus LoS matrix between two arrays"""
    distance = np.linalg.norm(rx_pos - tx_pos)
    a_rx = steering_vector(rx_offsets, _unit(tx_pos - rx_pos), wavelength)
    a_tx = steering_vector(tx_offsets, _unit(rx_pos - tx_pos), wavelength)
    return np.exp(-1j * 2 * np.pi * distance / wavelength) * np.outer(a_rx, a_tx)


def rician_fading(rng: np.random.Generator, los: np.ndarray, kappa: float) -> np.ndarray:
    """sqrt(kappa/(1+kappa)) LoS + sqrt(1/(1+kappa)) CN(0, 1); unit mean power per entry"""
    nlos = (rng.standard_normal(los.shape) + 1j * rng.standard_normal(los.shape)) / np.sqrt(2)
    if np.isinf(kappa):
        return los.astype(complex)
    return np.sqrt(kappa / (1 + kappa)) * los + np.sqrt(1 / (1 + kappa)) * nlos


def draw_link(rng: np.random.Generator, budget: LinkBudget, link: LinkClass,
              distance: float, los: np.ndarray) -> np.ndarray:
    """Small-scale fade scaled by the large-scale amplitude of one link"""
    return budget.amplitude(link, distance) * rician_fading(rng, los, budget.rician_factor(link))


def channels_from_positions(rng: np.random.Generator, geom: GeometryConfig, budget: LinkBudget,
                            nodes: NodePositions, n: int, m: int, group_sizes: Sequence[int],
                            normalize: bool = True) -> ChannelSet:
    lam = geom.wavelength
    tx_off = tx_element_offsets(n, geom.element_spacing)
    irs_off = irs_element_offsets(m, geom.element_spacing)
    no_offset = np.zeros((1, 3))
    k = nodes.users.shape[0]

    h_ts = np.zeros((m, n), dtype=complex)
    if m > 0:
        d_ts = np.linalg.norm(nodes.irs - nodes.tx)
        h_ts = draw_link(rng, budget, LinkClass.TX_IRS, d_ts,
                         los_component(irs_off, nodes.irs, tx_off, nodes.tx, lam))

    h_direct = np.empty((k, n), dtype=complex)
    h_irs = np.empty((k, m), dtype=complex)
    for u, user in enumerate(nodes.users):
        d_tu = np.linalg.norm(user - nodes.tx)
        h_direct[u] = draw_link(rng, budget, LinkClass.TX_USER, d_tu,
                                los_component(no_offset, user, tx_off, nodes.tx, lam))[0]
        if m > 0:
            d_su = np.linalg.norm(user - nodes.irs)
            h_irs[u] = draw_link(rng, budget, LinkClass.IRS_USER, d_su,
                                 los_component(no_offset, user, irs_off, nodes.irs, lam))[0]
        trace_print(f"user {u}: d_tx={d_tu:.2f} m, |h_direct|={np.linalg.norm(h_direct[u]):.3e}")

    if normalize:
        sigma = np.sqrt(budget.noise_power_watts())
        h_direct /= sigma
        h_irs /= sigma
    return ChannelSet(h_ts, h_direct, h_irs, tuple(group_sizes))


def generate_channels(geom: GeometryConfig, budget: LinkBudget, n: int, m: int,
                      group_sizes: Sequence[int], seed: int, realization: int = 0,
                      normalize: bool = True) -> ChannelSet:
    """Channel set of realization ``realization`` for ``seed``.

    With ``normalize`` the user-side channels are divided by the noise standard
    deviation, making the noise variance in every SINR exactly 1 (P_t in watts).
    """
    if n < 1 or m < 0:
        raise ConfigurationError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    if not group_sizes or any(int(k) < 1 for k in group_sizes):
        raise ConfigurationError(f"group_sizes must be non-empty and positive, got {group_sizes}")
    placement_seq, fading_seq = realization_seed(seed, realization).spawn(2)
    nodes = place_nodes(geom, group_sizes, placement_seq)
    rng = np.random.default_rng(fading_seq)
    return channels_from_positions(rng, geom, budget, nodes, n, m, group_sizes, normalize)
