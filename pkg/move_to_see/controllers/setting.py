import dataclasses
import json
from pathlib import Path
from typing import Any, TypeVar

from move_to_see.exceptions import ConfigurationError

JsonDict = dict[str, Any]

S = TypeVar("S", bound="SettingController")


class SettingController:
	"""Base for every configuration record of the simulator.

	Subclasses are frozen dataclasses. `validate()` runs right after
	construction so an invalid record can never exist.
	"""

	def __post_init__(self):
		self.validate()

	def validate(self) -> None:
		"""Raise ConfigurationError when the record is inconsistent."""

	@classmethod
	def from_dict(cls: type[S], data: JsonDict | None) -> S:
		"""Build a record from a JSON section, rejecting unknown keys."""
		data = dict(data or {})
		known = {f.name for f in dataclasses.fields(cls)}
		unknown = sorted(set(data) - known)
		if unknown:
			raise ConfigurationError(f"{cls.__name__}: unknown setting(s) {', '.join(unknown)}")

		return cls(**{key: _freeze(value) for key, value in data.items()})

	def as_dict(self) -> JsonDict:
		return {f.name: _thaw(getattr(self, f.name)) for f in dataclasses.fields(self)}

	def replace(self: S, **changes) -> S:
		return dataclasses.replace(self, **changes)


def load_json(path: str | Path) -> JsonDict:
	path = Path(path)
	try:
		with open(path) as f:
			return json.load(f)
	except FileNotFoundError:
		raise ConfigurationError(f"config file not found: {path}")
	except json.JSONDecodeError as e:
		raise ConfigurationError(f"{path}: invalid JSON ({e})")


def _freeze(value):
	# JSON lists become tuples so records stay hashable
	if isinstance(value, list):
		return tuple(_freeze(v) for v in value)
	return value


def _thaw(value):
	if isinstance(value, tuple):
		return [_thaw(v) for v in value]
	return value
