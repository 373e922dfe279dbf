"""
Monte-Carlo experiment runner.

Every experiment averages independent realizations r = 0..R-1; realization r
always uses channels derived from (seed, r), so sweeps share their random
numbers across sweep values and reruns reproduce the same rows.
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np
import pandas as pd

from experiments.csv_export import CsvExporter
from experiments.spec import ExperimentKind, ExperimentSpec
from optim.apg import SolveTrace, SolverOptions, apg_solve
from scenario.channel_gen import generate_channels
from scenario.geometry import dbm_to_watts
from system.errors import IrsApgError, SolveFailure
from system.types import LN2, ChannelSet
from utils.logging import debug_print, info_print, warning_print
from utils.progress_wrapper import ProgressMonitor, with_progress

T = TypeVar("T")


def solver_seed(seed: int, realization: int) -> int:
    """Initialization seed for realization ``realization``, independent of the channel streams"""
    return int(np.random.SeedSequence([seed, realization, 2]).generate_state(1)[0])


def realization_channels(spec: ExperimentSpec, realization: int, m: Optional[int] = None) -> ChannelSet:
    sc = spec.scenario
    return generate_channels(sc.geometry, sc.budget, sc.n, sc.m if m is None else int(m),
                             sc.group_sizes, spec.seed, realization)


def solve_realization(spec: ExperimentSpec, realization: int, m: Optional[int] = None,
                      pt_dbm: Optional[float] = None, tau: Optional[float] = None) -> SolveTrace:
    ch = realization_channels(spec, realization, m)
    changes = {"seed": solver_seed(spec.seed, realization)}
    if tau is not None:
        changes["tau"] = float(tau)
    opts = dataclasses.replace(spec.solver, **changes)
    p_t = spec.scenario.p_t if pt_dbm is None else dbm_to_watts(pt_dbm)
    return apg_solve(ch, opts, p_t)


def run_realizations(spec: ExperimentSpec, label: str, work: Callable[[int], T],
                     parallel: Optional[int] = None) -> List[T]:
    """Run ``work(r)`` for every realization; results come back in realization order"""
    workers = spec.parallel if parallel is None else parallel
    monitor = ProgressMonitor(label, spec.num_realizations)

    def guarded(r: int) -> T:
        try:
            result = work(r)
        except SolveFailure:
            monitor.mark_done(False)
            raise
        except IrsApgError as e:
            monitor.mark_done(False)
            raise SolveFailure(str(e), r, spec.kind.value) from e
        except Exception as e:
            monitor.mark_done(False)
            raise SolveFailure(f"{type(e).__name__}: {e}", r, spec.kind.value) from e
        monitor.mark_done()
        return result

    if workers <= 1:
        results = [guarded(r) for r in range(spec.num_realizations)]
    else:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="realization") as pool:
            results = list(pool.map(guarded, range(spec.num_realizations)))
    debug_print(monitor.summary())
    return results


def pad_trace(values: np.ndarray, length: int) -> np.ndarray:
    """Extend a trace to ``length`` entries by repeating its final value"""
    if values.size >= length:
        return values[:length]
    return np.concatenate([values, np.full(length - values.size, values[-1])])


@with_progress("Convergence experiment")
def run_convergence(spec: ExperimentSpec) -> pd.DataFrame:
    traces = run_realizations(spec, "convergence", lambda r: solve_realization(spec, r))
    length = max(len(t.records) for t in traces)
    smoothed = np.mean([pad_trace(t.smoothed_objectives(), length) for t in traces], axis=0)
    true = np.mean([pad_trace(t.true_sum_rates(), length) for t in traces], axis=0)
    return pd.DataFrame({
        "iter": np.arange(length),
        "mean_smoothed_bps_hz": smoothed / LN2,
        "mean_true_bps_hz": true / LN2,
    })


@with_progress("Transmit power sweep")
def run_sweep_pt(spec: ExperimentSpec) -> pd.DataFrame:
    rows = []
    for pt_dbm in spec.sweep_values:
        traces = run_realizations(spec, f"sweep-pt {pt_dbm:g} dBm",
                                  lambda r: solve_realization(spec, r, pt_dbm=pt_dbm))
        rate = np.mean([t.final_sum_rate for t in traces]) / LN2
        info_print(f"P_t = {pt_dbm:g} dBm: {rate:.4f} bps/Hz")
        rows.append({"pt_dbm": float(pt_dbm), "mean_rate_bps_hz": rate})
    return pd.DataFrame(rows, columns=["pt_dbm", "mean_rate_bps_hz"])


@with_progress("IRS size sweep")
def run_sweep_m(spec: ExperimentSpec) -> pd.DataFrame:
    rows = []
    for m in spec.sweep_values:
        m = int(m)
        traces = run_realizations(spec, f"sweep-m M={m}", lambda r: solve_realization(spec, r, m=m))
        rate = np.mean([t.final_sum_rate for t in traces]) / LN2
        info_print(f"M = {m}: {rate:.4f} bps/Hz")
        rows.append({"m": m, "mean_rate_bps_hz": rate})
    return pd.DataFrame(rows, columns=["m", "mean_rate_bps_hz"])


@with_progress("Runtime experiment")
def run_runtime(spec: ExperimentSpec) -> pd.DataFrame:
    """Per-iteration and total solve time versus M; always runs realizations sequentially"""
    if spec.parallel > 1:
        warning_print("runtime experiment ignores parallel workers so timings are not shared")
    if spec.warmup:
        # Discarded: first solve pays for imports and allocator warm-up
        solve_realization(spec, 0, m=int(spec.sweep_values[0]))
    rows = []
    for m in spec.sweep_values:
        m = int(m)
        traces = run_realizations(spec, f"runtime M={m}", lambda r: solve_realization(spec, r, m=m),
                                  parallel=1)
        per_iter = float(np.mean([t.seconds_per_iteration for t in traces]))
        total = float(np.mean([t.total_seconds for t in traces]))
        info_print(f"M = {m}: {per_iter * 1e3:.3f} ms/iteration, {total:.3f} s total")
        rows.append({"m": m, "mean_seconds_per_iteration": per_iter, "mean_total_seconds": total})
    return pd.DataFrame(rows, columns=["m", "mean_seconds_per_iteration", "mean_total_seconds"])


@with_progress("Smoothing sweep")
def run_sweep_tau(spec: ExperimentSpec) -> pd.DataFrame:
    rows = []
    for tau in spec.sweep_values:
        traces = run_realizations(spec, f"sweep-tau tau={tau:g}",
                                  lambda r: solve_realization(spec, r, tau=tau))
        smoothed = np.mean([t.final_objective for t in traces]) / LN2
        true = np.mean([t.final_sum_rate for t in traces]) / LN2
        rows.append({"tau": float(tau), "mean_smoothed_bps_hz": smoothed,
                     "mean_true_bps_hz": true, "mean_gap_bps_hz": true - smoothed})
    return pd.DataFrame(rows, columns=["tau", "mean_smoothed_bps_hz", "mean_true_bps_hz",
                                       "mean_gap_bps_hz"])


RUNNERS = {
    ExperimentKind.CONVERGENCE: run_convergence,
    ExperimentKind.SWEEP_PT: run_sweep_pt,
    ExperimentKind.SWEEP_M: run_sweep_m,
    ExperimentKind.RUNTIME: run_runtime,
    ExperimentKind.SWEEP_TAU: run_sweep_tau,
}


def run_experiment(spec: ExperimentSpec, config: Optional[dict] = None) -> pd.DataFrame:
    """Run ``spec`` and, when it names an output file, write the CSV there"""
    info_print(f"Running {spec.kind.value}: {spec.num_realizations} realizations, seed {spec.seed}")
    frame = RUNNERS[spec.kind](spec)
    if spec.out is not None:
        exporter = CsvExporter(spec.kind.value, spec.seed, config)
        exporter.export(frame, spec.out)
        info_print(f"Wrote {len(frame)} rows to {spec.out}")
    return frame


def solve_channels(ch: ChannelSet, opts: SolverOptions, pt_dbm: float) -> pd.DataFrame:
    """Single solve on a given channel set; one row per iteration of the trace"""
    trace = apg_solve(ch, opts, dbm_to_watts(pt_dbm))
    return pd.DataFrame({
        "iter": [r.iteration for r in trace.records],
        "smoothed_bps_hz": trace.smoothed_objectives() / LN2,
        "true_bps_hz": trace.true_sum_rates() / LN2,
        "alpha_f": [r.alpha_f for r in trace.records],
        "alpha_theta": [r.alpha_theta for r in trace.records],
    })
