#!/usr/bin/env python3
"""
irs-apg - joint transmit beamforming and IRS phase optimization for
multigroup multicast, with Monte-Carlo experiment sweeps.
"""

import sys
import os
import argparse
import signal

# Add src directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from experiments.csv_export import CsvExporter
from experiments.runner import run_experiment, solve_channels
from experiments.settings import ExperimentSettings
from experiments.spec import ExperimentKind
from scenario.channel_dump import load_channels, save_channels
from scenario.channel_gen import generate_channels
from system.errors import ConfigurationError, IrsApgError
from utils.logging import set_verbose_level, info_print, error_print

EXIT_FAILURE = 1
EXIT_CONFIG = 2


def _add_config_args(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="Settings file (key = value lines, or .json)")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="Override one setting; may be repeated")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irs-apg",
                                     description="IRS-assisted multigroup multicast beamforming")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="Increase verbosity (use -v, -vv, -vvv for levels 1-3)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a Monte-Carlo experiment and write its CSV")
    run.add_argument("experiment", choices=[k.value for k in ExperimentKind])
    _add_config_args(run)
    run.add_argument("--out", required=True, help="Output CSV path")
    run.add_argument("--seed", type=int, help="Master seed (overrides the settings)")
    run.add_argument("--realizations", type=int, help="Number of channel realizations")
    run.add_argument("--parallel", type=int, help="Worker threads for independent realizations")

    dump = sub.add_parser("dump-channels", help="Generate one channel realization and save it")
    _add_config_args(dump)
    dump.add_argument("--out", required=True, help="Output .npz path")
    dump.add_argument("--seed", type=int)
    dump.add_argument("--realization", type=int, default=0)

    solve = sub.add_parser("solve", help="Solve once on a saved channel set and write the trace")
    solve.add_argument("--channels", required=True, help="Channel file from dump-channels")
    _add_config_args(solve)
    solve.add_argument("--out", required=True, help="Output CSV path")

    show = sub.add_parser("show-config", help="Print the effective settings")
    _add_config_args(show)
    return parser


def load_settings(args) -> ExperimentSettings:
    settings = ExperimentSettings(args.config)
    settings.apply_overrides(args.overrides)
    for key, attr in (("seed", "seed"), ("num_realizations", "realizations"), ("parallel", "parallel")):
        value = getattr(args, attr, None)
        if value is not None:
            settings.set(key, value)
    return settings


def cmd_run(args) -> int:
    settings = load_settings(args)
    spec = settings.to_spec(args.experiment, args.out)
    run_experiment(spec, settings.get_all())
    return 0


def cmd_dump_channels(args) -> int:
    settings = load_settings(args)
    scenario = settings.scenario_config()
    seed = int(settings.get("seed"))
    ch = generate_channels(scenario.geometry, scenario.budget, scenario.n, scenario.m,
                           scenario.group_sizes, seed, args.realization)
    path = save_channels(args.out, ch, seed=seed, realization=args.realization)
    info_print(f"Saved realization {args.realization} (seed {seed}) to {path}")
    return 0


def cmd_solve(args) -> int:
    settings = load_settings(args)
    ch, meta = load_channels(args.channels)
    seed = int(settings.get("seed"))
    frame = solve_channels(ch, settings.solver_options(seed), float(settings.get("pt_dbm")))
    config = settings.get_all()
    config.update({"channels": str(args.channels), "channel_seed": meta["seed"],
                   "channel_realization": meta["realization"]})
    CsvExporter("solve", seed, config).export(frame, args.out)
    info_print(f"Final true sum rate {frame['true_bps_hz'].iloc[-1]:.4f} bps/Hz")
    return 0


def cmd_show_config(args) -> int:
    sys.stdout.write(load_settings(args).format_flat())
    return 0


COMMANDS = {
    "run": cmd_run,
    "dump-channels": cmd_dump_channels,
    "solve": cmd_solve,
    "show-config": cmd_show_config,
}


def setup_signal_handlers():
    """Exit cleanly on Ctrl+C or termination requests"""
    def signal_handler(signum, frame):
        error_print(f"Received signal {signum}, aborting")
        sys.exit(128 + signum)

    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    set_verbose_level(args.verbose)

    try:
        import setproctitle
        setproctitle.setproctitle(f"irs-apg {args.command}")
    except ImportError:
        # setproctitle is optional, continue without it
        pass

    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as e:
        error_print(f"Configuration error: {e}")
        return EXIT_CONFIG
    except IrsApgError as e:
        error_print(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    setup_signal_handlers()
    sys.exit(main())
