"""
Unit tests for seeded channel generation: fading statistics, path loss,
line-of-sight structure, determinism and noise normalization.
"""

import math

import numpy as np
import pytest

from scenario.channel_gen import draw_link, generate_channels, realization_seed, rician_fading
from scenario.geometry import GeometryConfig, LinkBudget, LinkClass
from system.errors import ConfigurationError
from system.rates import effective_channels, rate_breakdown
from system.types import BeamformerStack, PhaseVector


def _generate(seed=0, realization=0, m=16, normalize=True, budget=None):
    return generate_channels(GeometryConfig(), budget or LinkBudget(), 4, m, (2, 2), seed,
                             realization, normalize)


@pytest.mark.unit
class TestFading:

    @pytest.mark.parametrize("kappa,draws", [(10.0, 10_000), (0.0, 40_000), (1.0, 20_000)])
    def test_unit_mean_power(self, kappa, draws):
        """Test that Rician fading has unit mean power"""
        rng = np.random.default_rng(1)
        los = np.exp(1j * rng.uniform(0, 2 * np.pi, draws))
        fade = rician_fading(rng, los, kappa)
        assert np.mean(np.abs(fade) ** 2) == pytest.approx(1.0, rel=0.03)

    def test_doubling_distance_scales_power_by_pathloss(self):
        """Test that doubling distance scales power by 2^exponent"""
        budget = LinkBudget()
        los = np.ones(10_000, dtype=complex)
        near = draw_link(np.random.default_rng(2), budget, LinkClass.TX_IRS, 20.0, los)
        far = draw_link(np.random.default_rng(3), budget, LinkClass.TX_IRS, 40.0, los)
        ratio = np.mean(np.abs(near) ** 2) / np.mean(np.abs(far) ** 2)
        assert ratio == pytest.approx(2 ** 2.2, rel=0.05)

    def test_pure_los_columns_have_equal_magnitude(self):
        """Test that a pure line-of-sight link has equal-magnitude entries"""
        rician = {"tx_irs": math.inf, "irs_user": 10.0, "tx_user": -math.inf}
        ch = _generate(budget=LinkBudget(rician_k_db=rician))
        magnitudes = np.abs(ch.h_ts)
        np.testing.assert_allclose(magnitudes, magnitudes[0, 0], rtol=1e-12)


@pytest.mark.unit
class TestGenerateChannels:

    def test_dimensions(self):
        """Test the generated channel shapes"""
        ch = _generate(m=25)
        assert (ch.n, ch.m, ch.num_users, ch.group_sizes) == (4, 25, 4, (2, 2))

    def test_bit_identical_for_same_seed_and_realization(self):
        """Test that the same seed and realization give identical channels"""
        a = _generate(seed=9, realization=3)
        b = _generate(seed=9, realization=3)
        for name in ("h_ts", "h_direct", "h_irs"):
            assert getattr(a, name).tobytes() == getattr(b, name).tobytes()

    def test_realizations_differ(self):
        """Test that different realizations give different channels"""
        a = _generate(seed=9, realization=0)
        b = _generate(seed=9, realization=1)
        assert not np.array_equal(a.h_direct, b.h_direct)

    def test_substreams_are_keyed_by_seed_and_realization(self):
        """Test that substreams depend on both seed and realization"""
        assert realization_seed(1, 2).entropy == realization_seed(1, 2).entropy
        a = realization_seed(1, 2).generate_state(4)
        b = realization_seed(2, 1).generate_state(4)
        assert not np.array_equal(a, b)

    def test_without_irs(self):
        """Test generation with no IRS tiles"""
        ch = _generate(m=0)
        assert ch.m == 0

    def test_rejects_invalid_sizes(self):
        """Test that invalid sizes raise ConfigurationError"""
        with pytest.raises(ConfigurationError):
            generate_channels(GeometryConfig(), LinkBudget(), 0, 4, (1,), 0)
        with pytest.raises(ConfigurationError):
            generate_channels(GeometryConfig(), LinkBudget(), 2, 4, (), 0)

    def test_noise_normalization_is_exact(self, rng):
        """Test that normalization divides user-side channels by the noise deviation"""
        normalized = _generate(seed=4)
        raw = _generate(seed=4, normalize=False)
        sigma_sq = LinkBudget().noise_power_watts()
        f = BeamformerStack(rng.standard_normal(8) + 1j * rng.standard_normal(8), 2)
        theta = PhaseVector.from_angles(rng.uniform(0, 2 * np.pi, 16))

        powers = np.abs(effective_channels(raw, theta) @ f.blocks().T) ** 2
        own = powers[np.arange(raw.num_users), raw.group_of_user]
        explicit = np.log(1 + own / (sigma_sq + powers.sum(axis=1) - own))
        normalized_rates = rate_breakdown(normalized, f, theta).per_user_rate
        np.testing.assert_allclose(normalized_rates, explicit, rtol=0, atol=1e-10)
