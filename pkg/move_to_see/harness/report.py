"""
Trial results, their CSV form, and the grouped means of final objective
and target-area change compared between methods.
"""

import csv
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from move_to_see.exceptions import ConfigurationError
from move_to_see.harness.constants import (
	ABSOLUTE_DELTA_A,
	CELL_PARAMETERS,
	ERROR,
	FAILED_TERMINATIONS,
	GROUP_ALIASES,
	RELATIVE_DELTA_A,
	RESULT_FIELDS,
	RESULTS_FILE,
	STATUS_ERROR,
	STATUS_SUCCESS,
	SUMMARY_FIELDS,
)
from move_to_see.harness.sweep import TrialDescriptor
from move_to_see.servo.trajectory import TrajectoryLog

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialResult:
	trial_id: str
	method: str
	target_y: float
	target_z: float
	occ_y: float
	occ_z: float
	theta: float
	w1: float
	w2: float
	radius: float | None
	sigma: float
	replicate: int
	seed: int
	f_n: float
	a_start: float
	a_end: float
	# percentage points of image area
	delta_a: float
	steps: int
	termination: str
	status: str = STATUS_SUCCESS
	message: str = ""
	wall_time: float = 0.0

	@classmethod
	def from_log(
		cls, descriptor: TrialDescriptor, method: str, log: TrajectoryLog, wall_time: float
	) -> "TrialResult":
		return cls(
			trial_id=descriptor.trial_id,
			method=method,
			**descriptor.cell_params(),
			replicate=descriptor.replicate,
			seed=descriptor.seed,
			f_n=log.f_n,
			a_start=log.a_start,
			a_end=log.a_end,
			delta_a=log.delta_a,
			steps=len(log.steps),
			termination=log.termination,
			wall_time=wall_time,
		)

	@classmethod
	def failed(cls, descriptor: TrialDescriptor, method: str, message: str, wall_time: float) -> "TrialResult":
		return cls(
			trial_id=descriptor.trial_id,
			method=method,
			**descriptor.cell_params(),
			replicate=descriptor.replicate,
			seed=descriptor.seed,
			f_n=math.nan,
			a_start=math.nan,
			a_end=math.nan,
			delta_a=math.nan,
			steps=0,
			termination=ERROR,
			status=STATUS_ERROR,
			message=message,
			wall_time=wall_time,
		)

	@property
	def completed(self) -> bool:
		return self.status == STATUS_SUCCESS and self.termination not in FAILED_TERMINATIONS

	@property
	def relative_delta_a(self) -> float:
		"""Area change as percent of the start area; NaN when the target started invisible."""
		if not self.a_start > 0:
			return math.nan
		return 100.0 * (self.a_end - self.a_start) / self.a_start


def sort_results(results: list[TrialResult]) -> list[TrialResult]:
	return sorted(results, key=lambda r: (r.trial_id, r.method))


def write_results(results: list[TrialResult], path: str | Path) -> None:
	with open(path, "w", newline="") as f:
		writer = csv.DictWriter(f, fieldnames=RESULT_FIELDS)
		writer.writeheader()
		for result in sort_results(results):
			writer.writerow(asdict(result))


def read_results(path: str | Path) -> list[TrialResult]:
	path = Path(path)
	if path.is_dir():
		path = path / RESULTS_FILE
	if not path.exists():
		raise ConfigurationError(f"results file not found: {path}")

	types = {f.name: f.type for f in fields(TrialResult)}
	with open(path, newline="") as f:
		return [_parse_result(row, types) for row in csv.DictReader(f)]


def _parse_result(row: dict, types: dict) -> TrialResult:
	values = {}
	for name, raw in row.items():
		kind = types[name]
		if kind is str:
			values[name] = raw
		elif kind is int:
			values[name] = int(raw)
		elif raw == "":
			values[name] = None
		else:
			values[name] = float(raw)
	return TrialResult(**values)


@dataclass(frozen=True)
class AggregateRow:
	group: str
	value: str
	method: str
	count: int
	failures: int
	mean_f_n: float
	std_f_n: float
	mean_delta_a: float
	std_delta_a: float
	delta_a_kind: str = ABSOLUTE_DELTA_A


def group_value(result: TrialResult, group_by: str) -> str:
	names = GROUP_ALIASES.get(group_by, (group_by,))
	if any(name not in CELL_PARAMETERS for name in names):
		raise ConfigurationError(
			f"cannot group by {group_by!r}; choose from {', '.join([*CELL_PARAMETERS, *GROUP_ALIASES])}"
		)
	return ",".join("default" if v is None else f"{v:g}" for v in (getattr(result, n) for n in names))


def aggregate(results: list[TrialResult], group_by: str, relative: bool = False) -> list[AggregateRow]:
	"""Mean and spread of f_N and area change per (group value, method).

	Means cover completed trials only; IK failures and crashed trials are
	counted in `failures`. A group with no completed trial is left out.
	"""
	if not results:
		raise ConfigurationError("no results to aggregate")

	groups: dict[tuple[str, str], list[TrialResult]] = defaultdict(list)
	for result in results:
		groups[(group_value(result, group_by), result.method)].append(result)

	rows = []
	for (value, method), members in sorted(groups.items(), key=lambda item: _value_key(item[0])):
		completed = [r for r in members if r.completed]
		if not completed:
			logger.warning("group %s=%s (%s) has no completed trials, omitted", group_by, value, method)
			continue

		f_n = np.array([r.f_n for r in completed])
		delta = np.array([r.relative_delta_a if relative else r.delta_a for r in completed])
		delta = delta[np.isfinite(delta)]
		rows.append(
			AggregateRow(
				group=group_by,
				value=value,
				method=method,
				count=len(completed),
				failures=len(members) - len(completed),
				mean_f_n=float(f_n.mean()),
				std_f_n=float(f_n.std()),
				mean_delta_a=float(delta.mean()) if delta.size else math.nan,
				std_delta_a=float(delta.std()) if delta.size else math.nan,
				delta_a_kind=RELATIVE_DELTA_A if relative else ABSOLUTE_DELTA_A,
			)
		)
	return rows


def _value_key(key: tuple[str, str]):
	value, method = key
	try:
		return (0, tuple(float(v) for v in value.split(",")), "", method)
	except ValueError:
		return (1, (), value, method)


def write_summary(rows: list[AggregateRow], path: str | Path) -> None:
	with open(path, "w", newline="") as f:
		writer = csv.DictWriter(f, fieldnames=SUMMARY_FIELDS)
		writer.writeheader()
		for row in rows:
			writer.writerow(asdict(row))


def format_summary(rows: list[AggregateRow]) -> str:
	lines = [f"{'group':>10} {'value':>12} {'method':>9} {'n':>4} {'fail':>4} {'f_N':>8} {'dA':>8}"]
	for row in rows:
		lines.append(
			f"{row.group:>10} {row.value:>12} {row.method:>9} {row.count:>4} {row.failures:>4} "
			f"{row.mean_f_n:>8.4f} {row.mean_delta_a:>8.2f}"
		)
	if rows:
		lines.append(f"dA in {rows[0].delta_a_kind}")
	return "\n".join(lines)
