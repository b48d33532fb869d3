import argparse
import logging
import sys
from pathlib import Path

from move_to_see import __version__
from move_to_see.exceptions import ConfigurationError
from move_to_see.harness.config import load_experiment
from move_to_see.harness.constants import FRAMES_DIR, SUMMARY_FILE
from move_to_see.harness.orchestrator import run_sweep
from move_to_see.harness.plots import plot_objective, plot_trajectory, render_overlay
from move_to_see.harness.report import aggregate, format_summary, group_value, read_results, write_summary
from move_to_see.harness.sweep import expand_sweep
from move_to_see.harness.trial import (
	dump_frames,
	find_descriptor,
	first_descriptor,
	parse_trajectory_path,
	run_trial,
	trajectory_path,
	trial_scene,
)
from move_to_see.servo.constants import METHODS, PROPOSED
from move_to_see.servo.trajectory import TrajectoryLog


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(prog="move-to-see", description="Camera-array next-best-view servo simulator")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
	commands = parser.add_subparsers(dest="command", required=True)

	trial = commands.add_parser("run-trial", help="run one trial, the first cell of the config's grid")
	trial.add_argument("--config", required=True, type=Path)
	trial.add_argument("--method", choices=METHODS, default=PROPOSED)
	trial.add_argument("--out", type=Path, default=Path("."))
	trial.add_argument("--dump-frames", action="store_true", help="write every reference image as PPM")
	trial.set_defaults(handler=cmd_run_trial)

	sweep = commands.add_parser("sweep", help="run the config's full parameter grid")
	sweep.add_argument("--config", required=True, type=Path)
	sweep.add_argument("--out", required=True, type=Path)
	sweep.add_argument("--jobs", type=int, default=1)
	sweep.set_defaults(handler=cmd_sweep)

	compare = commands.add_parser("compare", help="aggregate sweep results per parameter value and method")
	compare.add_argument("--results", required=True, type=Path)
	compare.add_argument("--group-by", default="theta")
	compare.add_argument("--relative", action="store_true", help="area change relative to the start area")
	compare.add_argument("--out", type=Path, help=f"summary CSV (default: RESULTS/{SUMMARY_FILE})")
	compare.set_defaults(handler=cmd_compare)

	plot = commands.add_parser("plot", help="plot one trajectory CSV")
	plot.add_argument("--log", required=True, type=Path)
	plot.add_argument("--out", required=True, type=Path)
	plot.add_argument("--kind", choices=["trajectory", "objective"], default="trajectory")
	plot.add_argument(
		"--config", type=Path, help="experiment config the log came from; draws the trial's target and occluder"
	)
	plot.set_defaults(handler=cmd_plot)

	overlay = commands.add_parser("overlay", help="overlay one trajectory per value of a cell parameter")
	overlay.add_argument("--results", required=True, type=Path)
	overlay.add_argument("--out", required=True, type=Path)
	overlay.add_argument("--method", choices=METHODS, default=PROPOSED)
	overlay.add_argument("--group-by", default="theta", help="cell parameter, or weights")
	overlay.set_defaults(handler=cmd_overlay)
	return parser


def cmd_run_trial(args) -> int:
	config = load_experiment(args.config)
	descriptor = first_descriptor(config)
	result, log = run_trial(config, descriptor, args.method)

	args.out.mkdir(parents=True, exist_ok=True)
	log.to_csv(trajectory_path(args.out, descriptor.trial_id, args.method))
	if args.dump_frames:
		dump_frames(config, descriptor, log, args.out / FRAMES_DIR)

	print(
		f"{args.method}: {result.termination} after {result.steps} steps, "
		f"f_N {result.f_n:.4f}, area {result.a_start:.4f} -> {result.a_end:.4f}"
	)
	return 0


def cmd_sweep(args) -> int:
	config = load_experiment(args.config)
	results, run_log = run_sweep(config, expand_sweep(config.sweep), jobs=args.jobs, out_dir=args.out)
	rows = aggregate(results, "theta")
	write_summary(rows, args.out / SUMMARY_FILE)
	print(format_summary(rows))

	failures = run_log.failures()
	if failures:
		print(f"{len(failures)} trial run(s) failed, see the run log in {args.out}", file=sys.stderr)
	return 0


def cmd_compare(args) -> int:
	rows = aggregate(read_results(args.results), args.group_by, relative=args.relative)
	out = args.out or (args.results if args.results.is_dir() else args.results.parent) / SUMMARY_FILE
	write_summary(rows, out)
	print(format_summary(rows))
	return 0


def cmd_plot(args) -> int:
	method, scene = args.log.stem, None
	if args.config:
		trial_id, method = parse_trajectory_path(args.log)
		config = load_experiment(args.config)
		scene = trial_scene(config, find_descriptor(config, trial_id))

	log = TrajectoryLog.from_csv(args.log, method=method)
	if args.kind == "objective":
		plot_objective(log, args.out)
	else:
		plot_trajectory(log, args.out, scene)
	return 0


def cmd_overlay(args) -> int:
	results_dir = args.results if args.results.is_dir() else args.results.parent
	chosen = {}
	for result in read_results(args.results):
		if result.method != args.method:
			continue
		value = group_value(result, args.group_by)
		if value not in chosen:
			chosen[value] = result.trial_id

	if not chosen:
		raise ConfigurationError(f"no {args.method} trials in {args.results}")
	logs = {
		value: TrajectoryLog.from_csv(trajectory_path(results_dir, trial_id, args.method), method=args.method)
		for value, trial_id in chosen.items()
	}
	render_overlay(logs, args.out, args.group_by)
	return 0


def main(argv: list[str] | None = None) -> int:
	args = build_parser().parse_args(argv)
	logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
	try:
		return args.handler(args)
	except ConfigurationError as e:
		print(f"configuration error: {e}", file=sys.stderr)
		return 2


if __name__ == "__main__":
	sys.exit(main())
