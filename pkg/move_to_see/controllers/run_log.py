import csv
import logging
import traceback as tb
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

RUN_LOG_FIELDS = ["trial_id", "method", "status", "message", "traceback"]


@dataclass
class RunLogEntry:
	trial_id: str
	method: str
	status: str = "Queued"
	message: str = ""
	traceback: str = ""

	@property
	def title(self) -> str:
		title = self.message or self.method
		return title if len(title) < 100 else title[:100] + "..."


@dataclass
class RunLog:
	"""Status record of every trial a sweep dispatched.

	Successful trials only carry their status; failed ones keep the
	exception message and traceback so a sweep can finish and be audited
	afterwards.
	"""

	entries: list[RunLogEntry] = field(default_factory=list)

	def create_log(
		self,
		trial_id: str,
		method: str,
		status: str = "Queued",
		exception: BaseException | None = None,
		message: str | None = None,
	) -> RunLogEntry:
		entry = self._find(trial_id, method)
		if entry is None:
			entry = RunLogEntry(trial_id=trial_id, method=method)
			self.entries.append(entry)

		entry.status = status
		if exception is not None:
			entry.message = message or _get_message(exception)
			entry.traceback = "".join(tb.format_exception(type(exception), exception, exception.__traceback__))
		elif message:
			entry.message = message

		if status == "Error":
			logger.warning("trial %s (%s) failed: %s", trial_id, method, entry.title)
		return entry

	def record(self, entry: RunLogEntry) -> RunLogEntry:
		"""Take over an entry created elsewhere, e.g. in a worker process."""
		existing = self._find(entry.trial_id, entry.method)
		if existing is not None:
			self.entries.remove(existing)
		self.entries.append(entry)
		return entry

	def failures(self) -> list[RunLogEntry]:
		return [e for e in self.entries if e.status == "Error"]

	def write_csv(self, path: str | Path) -> None:
		with open(path, "w", newline="") as f:
			writer = csv.DictWriter(f, fieldnames=RUN_LOG_FIELDS)
			writer.writeheader()
			for entry in sorted(self.entries, key=lambda e: (e.trial_id, e.method)):
				writer.writerow({name: getattr(entry, name) for name in RUN_LOG_FIELDS})

	def _find(self, trial_id: str, method: str) -> RunLogEntry | None:
		for entry in self.entries:
			if entry.trial_id == trial_id and entry.method == method:
				return entry
		return None


def _get_message(exception: BaseException) -> str:
	if getattr(exception, "message", None):
		return str(exception.message)
	elif str(exception):
		return str(exception)
	else:
		return f"{type(exception).__name__} while running trial"
