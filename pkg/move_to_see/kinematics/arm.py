from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from move_to_see.controllers.setting import JsonDict, load_json
from move_to_see.exceptions import ConfigurationError
from move_to_see.kinematics.constants import DEFAULT_ARM_FILE, NUM_JOINTS
from move_to_see.scene.geometry import Pose

JointConfig = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class ArmModel:
	"""Serial revolute arm in standard Denavit-Hartenberg form.

	`dh_rows` holds one (a, alpha, d, theta_offset) row per joint. `tool` maps
	the last DH frame to the camera frame (x image right, y image down,
	z optical axis). `start_q` is the experiment start configuration.
	"""

	dh_rows: NDArray[np.float64]
	joint_limits: NDArray[np.float64]
	base_pose: Pose = field(default_factory=Pose.identity)
	tool: Pose = field(default_factory=Pose.identity)
	start_q: NDArray[np.float64] | None = None
	name: str = "arm"

	def __post_init__(self):
		dh_rows = np.asarray(self.dh_rows, dtype=np.float64)
		if dh_rows.shape != (NUM_JOINTS, 4):
			raise ConfigurationError(f"an arm needs exactly {NUM_JOINTS} DH rows of (a, alpha, d, theta_offset)")
		limits = np.asarray(self.joint_limits, dtype=np.float64)
		if limits.shape != (NUM_JOINTS, 2):
			raise ConfigurationError(f"an arm needs {NUM_JOINTS} (lo, hi) joint limit pairs")
		if np.any(limits[:, 0] >= limits[:, 1]):
			raise ConfigurationError("every joint limit needs lo < hi")

		start_q = np.zeros(NUM_JOINTS) if self.start_q is None else as_joint_config(self.start_q)
		for arr in (dh_rows, limits, start_q):
			arr.setflags(write=False)
		object.__setattr__(self, "dh_rows", dh_rows)
		object.__setattr__(self, "joint_limits", limits)
		object.__setattr__(self, "start_q", start_q)

	def within_limits(self, q: ArrayLike) -> bool:
		q = np.asarray(q)
		return bool(np.all(q >= self.joint_limits[:, 0]) and np.all(q <= self.joint_limits[:, 1]))

	@classmethod
	def from_dict(cls, data: JsonDict) -> "ArmModel":
		try:
			return cls(
				dh_rows=data["dh_rows"],
				joint_limits=data["joint_limits"],
				base_pose=Pose.from_dict(data.get("base_pose")),
				tool=Pose.from_dict(data.get("tool")),
				start_q=data.get("start_q"),
				name=data.get("name", "arm"),
			)
		except KeyError as e:
			raise ConfigurationError(f"arm description is missing {e.args[0]!r}")

	def as_dict(self) -> JsonDict:
		return {
			"name": self.name,
			"dh_rows": self.dh_rows.tolist(),
			"joint_limits": self.joint_limits.tolist(),
			"base_pose": self.base_pose.as_dict(),
			"tool": self.tool.as_dict(),
			"start_q": self.start_q.tolist(),
		}


def as_joint_config(q: ArrayLike) -> JointConfig:
	q = np.asarray(q, dtype=np.float64).reshape(-1)
	if q.shape != (NUM_JOINTS,):
		raise ConfigurationError(f"a joint configuration has {NUM_JOINTS} entries, got {q.shape[0]}")
	if not np.all(np.isfinite(q)):
		raise ConfigurationError("joint configuration must be finite")
	return q


def load_arm(source: str | Path | JsonDict | None = None) -> ArmModel:
	"""Load an arm description from a JSON file, an inline dict, or the shipped default."""
	if source is None:
		source = DEFAULT_ARM_FILE
	if isinstance(source, dict):
		return ArmModel.from_dict(source)
	return ArmModel.from_dict(load_json(source))
