"""
Unit tests for the reference computations: finite differences, scalar-loop
rates and the smoothing sandwich audit.
"""

import math

import numpy as np
import pytest

from oracle.brute_force import brute_min_group_rate
from oracle.finite_difference import fd_gradient, relative_error
from oracle import sandwich as sandwich_module
from oracle.sandwich import sandwich_audit
from optim.smoothing import SmoothingParam
from system.errors import InvalidInputError, NumericalError, SandwichViolation
from system.rates import rate_breakdown, user_rate
from system.types import BeamformerStack, ChannelSet, PhaseVector, random_channel_set


@pytest.mark.unit
@pytest.mark.oracle
class TestFiniteDifference:

    def test_squared_norm(self, rng):
        """Test the gradient of ||x||^2, which is x"""
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        grad = fd_gradient(lambda v: float(np.vdot(v, v).real), x, h=1e-5)
        assert np.max(np.abs(grad - x)) < 1e-8

    def test_real_linear_functional(self, rng):
        """Test the gradient of Re(a^H x), which is a / 2"""
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        grad = fd_gradient(lambda v: float(np.real(np.vdot(a, v))), x, h=1e-5)
        assert np.max(np.abs(grad - a / 2)) < 1e-8

    def test_non_finite_objective(self):
        """Test that a non-finite objective raises NumericalError"""
        with pytest.raises(NumericalError):
            fd_gradient(lambda v: math.inf, np.zeros(2, dtype=complex))

    def test_rejects_non_positive_step(self):
        """Test that a zero step is rejected"""
        with pytest.raises(InvalidInputError):
            fd_gradient(lambda v: 0.0, np.zeros(2, dtype=complex), h=0.0)

    def test_relative_error_of_zero_reference(self):
        """Test the floored denominator of relative_error"""
        assert relative_error(np.zeros(3), np.full(3, 1e-13)) == pytest.approx(np.sqrt(3) * 0.1)


@pytest.mark.unit
@pytest.mark.oracle
class TestBruteForce:

    def test_agrees_with_vectorized_model(self, small_channels, feasible_point):
        """Test scalar-loop rates against the vectorized breakdown"""
        f, theta, _ = feasible_point
        loops = brute_min_group_rate(small_channels, f, theta)
        model = rate_breakdown(small_channels, f, theta)
        np.testing.assert_allclose(loops.per_user_rate, model.per_user_rate, rtol=0, atol=1e-10)
        assert abs(loops.sum_rate - model.sum_rate) < 1e-10

    def test_zero_beamformer(self, small_channels, feasible_point):
        """Test that a zero beamformer gives zero rates"""
        _, theta, _ = feasible_point
        f = BeamformerStack.zeros(small_channels.n, small_channels.num_groups)
        assert np.all(brute_min_group_rate(small_channels, f, theta).per_user_rate == 0)

    def test_single_user(self, rng):
        """Test that one user sums to its own rate"""
        ch = random_channel_set(rng, n=2, m=3, group_sizes=(1,))
        f = BeamformerStack(rng.standard_normal(2) + 0j, 1)
        theta = PhaseVector.from_angles(rng.uniform(0, 2 * np.pi, 3))
        assert brute_min_group_rate(ch, f, theta).sum_rate == pytest.approx(
            user_rate(ch, f, theta, 0, 0), rel=1e-12)

    def test_rejects_large_instances(self, rng):
        """Test that more than 16 users are rejected"""
        ch = random_channel_set(rng, n=1, m=1, group_sizes=(17,))
        with pytest.raises(InvalidInputError):
            brute_min_group_rate(ch, BeamformerStack(np.ones(1), 1), PhaseVector(np.ones(1)))

    @pytest.mark.slow
    def test_agrees_on_random_instances(self, random_instance):
        """Test scalar-loop rates against the vectorized breakdown on 500 random instances"""
        rng = np.random.default_rng(408)
        for trial in range(500):
            ch, f, theta = random_instance(rng)
            loops = brute_min_group_rate(ch, f, theta)
            model = rate_breakdown(ch, f, theta)
            np.testing.assert_allclose(loops.per_user_rate, model.per_user_rate, rtol=1e-10,
                                       atol=1e-12, err_msg=f"trial {trial}")
            np.testing.assert_allclose(loops.per_group_rate, model.per_group_rate, rtol=1e-10,
                                       atol=1e-12, err_msg=f"trial {trial}")
            assert abs(loops.sum_rate - model.sum_rate) <= 1e-10 * max(1.0, model.sum_rate)


@pytest.mark.unit
@pytest.mark.oracle
class TestSandwichAudit:

    def test_singleton_groups_have_no_gap(self, rng):
        """Test that singleton groups have zero gap"""
        ch = random_channel_set(rng, n=2, m=2, group_sizes=(1, 1))
        f = BeamformerStack(rng.standard_normal(4) + 1j * rng.standard_normal(4), 2)
        gap = sandwich_audit(ch, f, PhaseVector(np.ones(2)), 50.0)
        assert gap.lower_gap == 0.0
        assert gap.upper_gap == 0.0

    def test_equal_rates_reach_the_bound(self):
        """Test that equal rates reach the ln(K_g) / tau bound"""
        row = np.array([[0.4, 1.0j]])
        ch = ChannelSet(np.zeros((0, 2)), np.vstack([row, row, row]), np.zeros((3, 0)), (3,))
        gap = sandwich_audit(ch, BeamformerStack([1.0, 1.0], 1), PhaseVector([]), 10.0)
        assert gap.lower_gap == pytest.approx(math.log(3) / 10.0, rel=1e-12)
        assert abs(gap.upper_gap) < 1e-12

    @pytest.mark.parametrize("tau", [5.0, 50.0, 500.0])
    def test_randomized_audit(self, rng, small_channels, tau):
        """Test the bounds on 300 random points per tau"""
        ch = small_channels
        bound = SmoothingParam(tau).max_gap(ch.group_sizes)
        for _ in range(300):
            raw = rng.standard_normal(6) + 1j * rng.standard_normal(6)
            f = BeamformerStack(raw * rng.uniform(0.1, 3.0) / np.linalg.norm(raw), 2)
            theta = PhaseVector.from_angles(rng.uniform(0, 2 * np.pi, ch.m))
            gap = sandwich_audit(ch, f, theta, tau)
            assert -1e-10 <= gap.lower_gap <= bound + 1e-10

    def test_violation_names_the_group(self, mocker, small_channels, feasible_point):
        """Test that a violation reports the offending group"""
        f, theta, _ = feasible_point
        real = sandwich_module.smoothed_group_rates

        def inflated(*args, **kwargs):
            values = real(*args, **kwargs).copy()
            values[1] += 1.0
            return values

        mocker.patch.object(sandwich_module, "smoothed_group_rates", side_effect=inflated)
        with pytest.raises(SandwichViolation) as excinfo:
            sandwich_audit(small_channels, f, theta, 50.0)
        assert excinfo.value.group == 1
