"""
Elementary 3D types shared by every module.

Vectors are plain ``numpy`` arrays of shape (3,). Orientations are unit
quaternions stored scalar-last ``(x, y, z, w)``, the convention of
``scipy.spatial.transform.Rotation``.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from move_to_see.exceptions import ConfigurationError

Vec3 = NDArray[np.float64]

UNIT_TOLERANCE = 1e-9
IDENTITY_QUATERNION = (0.0, 0.0, 0.0, 1.0)


def as_vec3(value: ArrayLike, name: str = "vector") -> Vec3:
	vec = np.asarray(value, dtype=np.float64).reshape(-1)
	if vec.shape != (3,):
		raise ConfigurationError(f"{name} must have 3 components, got {vec.shape[0]}")
	if not np.all(np.isfinite(vec)):
		raise ConfigurationError(f"{name} must be finite")
	return vec


def unit(value: ArrayLike, name: str = "direction") -> Vec3:
	vec = as_vec3(value, name)
	norm = np.linalg.norm(vec)
	if norm == 0.0:
		raise ConfigurationError(f"{name} must be non-zero")
	return vec / norm


def is_unit(value: ArrayLike) -> bool:
	return abs(np.linalg.norm(value) - 1.0) < UNIT_TOLERANCE


@dataclass(frozen=True, eq=False)
class Pose:
	position: Vec3
	quaternion: NDArray[np.float64]

	def __post_init__(self):
		object.__setattr__(self, "position", as_vec3(self.position, "position"))
		quat = np.asarray(self.quaternion, dtype=np.float64).reshape(-1)
		if quat.shape != (4,):
			raise ConfigurationError("quaternion must have 4 components (x, y, z, w)")
		if abs(np.linalg.norm(quat) - 1.0) > UNIT_TOLERANCE:
			raise ConfigurationError("quaternion must have unit norm")
		object.__setattr__(self, "quaternion", quat)

	@classmethod
	def identity(cls) -> "Pose":
		return cls(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

	@classmethod
	def from_rotation(cls, position: ArrayLike, rotation: Rotation) -> "Pose":
		quat = rotation.as_quat()
		return cls(position, quat / np.linalg.norm(quat))

	@classmethod
	def from_matrix(cls, rotation: ArrayLike, position: ArrayLike) -> "Pose":
		return cls.from_rotation(position, Rotation.from_matrix(np.asarray(rotation)))

	@classmethod
	def from_homogeneous(cls, transform: ArrayLike) -> "Pose":
		transform = np.asarray(transform, dtype=np.float64)
		return cls.from_matrix(transform[:3, :3], transform[:3, 3])

	@classmethod
	def from_dict(cls, data: dict | None) -> "Pose":
		if not data:
			return cls.identity()
		return cls(data.get("position", (0.0, 0.0, 0.0)), data.get("quaternion", IDENTITY_QUATERNION))

	def as_dict(self) -> dict:
		return {"position": self.position.tolist(), "quaternion": self.quaternion.tolist()}

	@property
	def rotation(self) -> Rotation:
		return Rotation.from_quat(self.quaternion)

	@property
	def matrix(self) -> NDArray[np.float64]:
		return self.rotation.as_matrix()

	@property
	def optical_axis(self) -> Vec3:
		"""World direction of the frame's +z axis."""
		return self.matrix[:, 2]

	def homogeneous(self) -> NDArray[np.float64]:
		transform = np.eye(4)
		transform[:3, :3] = self.matrix
		transform[:3, 3] = self.position
		return transform

	def transform_point(self, point: ArrayLike) -> Vec3:
		return self.matrix @ np.asarray(point, dtype=np.float64) + self.position

	def compose(self, other: "Pose") -> "Pose":
		"""Return self * other (other expressed in this frame)."""
		return Pose.from_rotation(self.transform_point(other.position), self.rotation * other.rotation)

	def translated(self, offset: ArrayLike) -> "Pose":
		return Pose(self.position + as_vec3(offset, "offset"), self.quaternion)
