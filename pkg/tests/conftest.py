"""
Global pytest configuration and shared fixtures for the irs-apg tests.
Every fixture builds its data from a fixed seed, so tests are reproducible.
"""

import math
import sys

import pytest
from pathlib import Path

import numpy as np

# Add src to Python path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from experiments.settings import ExperimentSettings
from system.types import BeamformerStack, PhaseVector, random_channel_set
from utils.logging import get_verbose_level, set_verbose_level


@pytest.fixture(autouse=True)
def restore_verbose_level():
    """Keep verbosity changes made by one test from leaking into the next"""
    level = get_verbose_level()
    yield
    set_verbose_level(level)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_channels(rng):
    """N=3 antennas, M=4 tiles, groups of 2 and 3 users with CN(0,1) entries"""
    return random_channel_set(rng, n=3, m=4, group_sizes=(2, 3))


@pytest.fixture
def feasible_point(rng, small_channels):
    """Beamformer on the power sphere ||f||^2 = 2 and unit-modulus phases"""
    ch = small_channels
    raw = rng.standard_normal(ch.n * ch.num_groups) + 1j * rng.standard_normal(ch.n * ch.num_groups)
    f = BeamformerStack(raw * (np.sqrt(2.0) / np.linalg.norm(raw)), ch.num_groups)
    theta = PhaseVector.from_angles(rng.uniform(0.0, 2 * np.pi, ch.m))
    return f, theta, 2.0


@pytest.fixture
def isolated_settings(tmp_path):
    """Settings tuned for quick experiments, with outputs under a temp dir"""
    settings = ExperimentSettings()
    settings.apply_overrides([
        "n=2", "m=4", "group_sizes=[2,2]", "num_realizations=2",
        "max_iters=30", "tol=1e-4",
    ])
    settings.tmp_path = tmp_path
    return settings


@pytest.fixture
def random_instance():
    """Factory drawing a random (channels, f, theta) within the given size limits"""
    def draw(rng, max_n=8, max_m=32, max_groups=3, max_users=6, min_groups=1, min_m=0):
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(min_m, max_m + 1))
        groups = int(rng.integers(min_groups, max_groups + 1))
        per_group = max(1, max_users // groups)
        sizes = tuple(int(k) for k in rng.integers(1, per_group + 1, size=groups))
        ch = random_channel_set(rng, n=n, m=m, group_sizes=sizes)
        raw = rng.standard_normal(n * groups) + 1j * rng.standard_normal(n * groups)
        f = BeamformerStack(raw * (math.sqrt(rng.uniform(0.5, 10.0)) / np.linalg.norm(raw)), groups)
        theta = PhaseVector.from_angles(rng.uniform(0.0, 2 * np.pi, m))
        return ch, f, theta
    return draw
