"""
Dispatches one job per (trial, method) pair to a worker pool and collects
results and run-log entries. A failing trial is recorded, never fatal.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from move_to_see.controllers.run_log import RunLog, RunLogEntry
from move_to_see.harness.config import ExperimentConfig
from move_to_see.harness.constants import RESULTS_FILE, RUN_LOG_FILE, STATUS_ERROR, STATUS_SUCCESS
from move_to_see.harness.report import TrialResult, sort_results, write_results
from move_to_see.harness.sweep import TrialDescriptor
from move_to_see.harness.trial import run_trial, trajectory_path

logger = logging.getLogger(__name__)


def run_sweep(
	config: ExperimentConfig,
	descriptors: list[TrialDescriptor],
	jobs: int = 1,
	out_dir: str | Path | None = None,
) -> tuple[list[TrialResult], RunLog]:
	"""Run every method of the config's sweep on each descriptor.

	With `out_dir`, each trajectory goes to trial_<id>_<method>.csv and the
	collected results and run log are written beside them. Results come back
	sorted by (trial_id, method) whatever the degree of parallelism.
	"""
	if out_dir is not None:
		Path(out_dir).mkdir(parents=True, exist_ok=True)

	run_log = RunLog()
	pairs = [(d, method) for d in descriptors for method in config.sweep.methods]
	for descriptor, method in pairs:
		run_log.create_log(descriptor.trial_id, method, status="Queued")

	logger.info("dispatching %d trial runs on %d worker(s)", len(pairs), jobs)
	if jobs <= 1:
		outcomes = [execute_trial(config, d, method, out_dir) for d, method in pairs]
	else:
		with ProcessPoolExecutor(max_workers=jobs) as pool:
			futures = [pool.submit(execute_trial, config, d, method, out_dir) for d, method in pairs]
			outcomes = [future.result() for future in futures]

	results = []
	for result, entry in outcomes:
		results.append(result)
		run_log.record(entry)

	results = sort_results(results)
	if out_dir is not None:
		write_results(results, Path(out_dir) / RESULTS_FILE)
		run_log.write_csv(Path(out_dir) / RUN_LOG_FILE)
	return results, run_log


def execute_trial(
	config: ExperimentConfig, descriptor: TrialDescriptor, method: str, out_dir: str | Path | None = None
) -> tuple[TrialResult, RunLogEntry]:
	"""Worker job: run one trial and report its outcome instead of raising."""
	local_log = RunLog()
	start = time.perf_counter()
	try:
		result, log = run_trial(config, descriptor, method)
		if out_dir is not None:
			log.to_csv(trajectory_path(out_dir, descriptor.trial_id, method))
	except Exception as e:
		entry = local_log.create_log(descriptor.trial_id, method, status=STATUS_ERROR, exception=e)
		return TrialResult.failed(descriptor, method, entry.message, time.perf_counter() - start), entry

	entry = local_log.create_log(descriptor.trial_id, method, status=STATUS_SUCCESS, message=result.termination)
	return result, entry
