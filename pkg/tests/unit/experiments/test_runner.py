"""
Unit tests for the Monte-Carlo runner on small scenarios.
"""

import numpy as np
import pytest

from experiments.csv_export import read_results
from experiments.runner import pad_trace, run_experiment, solve_channels, solver_seed
from experiments.settings import ExperimentSettings
from optim.apg import SolverOptions
from system.errors import NumericalError, SolveFailure
from system.types import random_channel_set


def _spec(settings, kind, *overrides, out=None):
    settings.apply_overrides(list(overrides))
    return settings.to_spec(kind, out)


@pytest.mark.unit
class TestHelpers:

    def test_pad_trace_repeats_final_value(self):
        """Test that a short trace is padded with its final value"""
        np.testing.assert_array_equal(pad_trace(np.array([1.0, 2.0]), 4), [1.0, 2.0, 2.0, 2.0])

    def test_solver_seed_depends_on_realization(self):
        """Test that solver seeds differ per realization and are reproducible"""
        assert solver_seed(0, 0) != solver_seed(0, 1)
        assert solver_seed(3, 2) == solver_seed(3, 2)


@pytest.mark.unit
class TestConvergence:

    def test_single_iteration_gives_two_rows(self, isolated_settings):
        """Test that one iteration gives rows for iterations 0 and 1"""
        spec = _spec(isolated_settings, "convergence", "num_realizations=1", "max_iters=1")
        frame = run_experiment(spec)
        assert list(frame.columns) == ["iter", "mean_smoothed_bps_hz", "mean_true_bps_hz"]
        assert list(frame["iter"]) == [0, 1]

    def test_mean_curve_is_nondecreasing(self, isolated_settings):
        """Test that the mean smoothed curve never decreases"""
        frame = run_experiment(_spec(isolated_settings, "convergence", "num_realizations=3"))
        assert np.all(np.diff(frame["mean_smoothed_bps_hz"].to_numpy()) >= 0)

    def test_same_seed_gives_identical_bytes(self, isolated_settings):
        """Test that two runs with the same seed write identical files"""
        paths = []
        for name in ("a.csv", "b.csv"):
            settings = ExperimentSettings()
            settings.apply_overrides(["n=2", "m=4", "group_sizes=[2,2]", "num_realizations=2",
                                      "max_iters=20", "seed=17"])
            path = isolated_settings.tmp_path / name
            run_experiment(settings.to_spec("convergence", path), settings.get_all())
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_parallel_matches_sequential(self, isolated_settings):
        """Test that parallel realizations give the sequential result"""
        sequential = run_experiment(_spec(isolated_settings, "convergence", "num_realizations=4"))
        parallel = run_experiment(_spec(isolated_settings, "convergence", "parallel=3"))
        np.testing.assert_array_equal(sequential.to_numpy(), parallel.to_numpy())

    def test_failure_reports_realization(self, mocker, isolated_settings):
        """Test that a numerical error surfaces as a SolveFailure with its realization"""
        mocker.patch("experiments.runner.apg_solve", side_effect=NumericalError("objective is nan"))
        with pytest.raises(SolveFailure) as excinfo:
            run_experiment(_spec(isolated_settings, "convergence"))
        assert excinfo.value.realization == 0
        assert excinfo.value.experiment == "convergence"

    def test_unexpected_error_is_wrapped(self, mocker, isolated_settings):
        """Test that an unexpected exception is reported as a SolveFailure"""
        mocker.patch("experiments.runner.apg_solve", side_effect=FloatingPointError("overflow in exp"))
        with pytest.raises(SolveFailure) as excinfo:
            run_experiment(_spec(isolated_settings, "convergence", "parallel=2"))
        assert excinfo.value.realization == 0
        assert "FloatingPointError: overflow in exp" in str(excinfo.value)
        assert isinstance(excinfo.value.__cause__, FloatingPointError)


@pytest.mark.unit
class TestSweeps:

    def test_single_power_point(self, isolated_settings):
        """Test a power sweep with a single point"""
        frame = run_experiment(_spec(isolated_settings, "sweep-pt", "sweep_values=[20]"))
        assert list(frame.columns) == ["pt_dbm", "mean_rate_bps_hz"]
        assert len(frame) == 1

    def test_sweep_m_with_no_irs(self, isolated_settings):
        """Test a tile sweep that includes the no-IRS case"""
        frame = run_experiment(_spec(isolated_settings, "sweep-m", "sweep_values=[0, 4]"))
        assert list(frame["m"]) == [0, 4]
        assert np.all(frame["mean_rate_bps_hz"] > 0)

    def test_sweep_tau_gap_within_bound(self, isolated_settings):
        """Test that the smoothing gap stays within ln(K_g) / tau per group"""
        frame = run_experiment(_spec(isolated_settings, "sweep-tau", "sweep_values=[5, 50]"))
        for tau, gap in zip(frame["tau"], frame["mean_gap_bps_hz"]):
            # 2 ln(2) / tau nats for two groups of two users
            bound_bits = 2.0 / tau
            assert -1e-9 <= gap <= bound_bits + 1e-9

    def test_runtime_single_iteration(self, isolated_settings):
        """Test runtime columns when each solve runs one iteration"""
        frame = run_experiment(_spec(isolated_settings, "runtime", "sweep_values=[4, 9]",
                                     "max_iters=1"))
        assert list(frame.columns) == ["m", "mean_seconds_per_iteration", "mean_total_seconds"]
        np.testing.assert_allclose(frame["mean_seconds_per_iteration"], frame["mean_total_seconds"])
        assert np.all(frame["mean_total_seconds"] > 0)

    def test_csv_written_with_metadata(self, isolated_settings):
        """Test that the CSV carries metadata lines ahead of the rows"""
        out = isolated_settings.tmp_path / "pt.csv"
        spec = _spec(isolated_settings, "sweep-pt", "sweep_values=[10, 20]", out=out)
        run_experiment(spec, isolated_settings.get_all())
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# irs-apg version = ")
        assert "# experiment = sweep-pt" in lines
        assert "# tau = 50.0" in lines
        assert len(read_results(out)) == 2


@pytest.mark.unit
def test_solve_channels_trace(rng):
    """Test the per-iteration trace of a single solve"""
    ch = random_channel_set(rng, n=2, m=3, group_sizes=(2, 1))
    frame = solve_channels(ch, SolverOptions(max_iters=5), pt_dbm=30.0)
    assert list(frame.columns) == ["iter", "smoothed_bps_hz", "true_bps_hz", "alpha_f", "alpha_theta"]
    assert frame["iter"].iloc[0] == 0
    assert np.all(frame["true_bps_hz"] >= frame["smoothed_bps_hz"] - 1e-12)
