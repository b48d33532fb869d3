import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from move_to_see.controllers.setting import SettingController
from move_to_see.exceptions import ConfigurationError
from move_to_see.render.constants import DEFAULT_ARRAY_OFFSETS, MIN_IMAGE_SIZE
from move_to_see.scene.geometry import IDENTITY_QUATERNION, Pose


@dataclass(frozen=True)
class CameraIntrinsics(SettingController):
	"""Pinhole camera shared by every camera of the array.

	Camera frame: x to the image right, y to the image bottom, z along the
	optical axis. Pixel (u, v) is column u, row v; its center sits at the
	integer coordinate, so the default principal point is the middle of the
	pixel grid.
	"""

	image_width: int = 64
	image_height: int = 64
	horizontal_fov: float = math.radians(60.0)
	principal_point: tuple[float, float] | None = None

	def validate(self):
		if self.image_width < MIN_IMAGE_SIZE or self.image_height < MIN_IMAGE_SIZE:
			raise ConfigurationError(f"image dimensions must be at least {MIN_IMAGE_SIZE} pixels")
		if not 0.0 < self.horizontal_fov < math.pi:
			raise ConfigurationError("horizontal_fov must lie in (0, pi) radians")

	@property
	def focal_length(self) -> float:
		"""Focal length in pixels (square pixels)."""
		return (self.image_width / 2.0) / math.tan(self.horizontal_fov / 2.0)

	@property
	def vertical_fov(self) -> float:
		return 2.0 * math.atan((self.image_height / 2.0) / self.focal_length)

	@property
	def center(self) -> tuple[float, float]:
		if self.principal_point is not None:
			return tuple(self.principal_point)
		return ((self.image_width - 1) / 2.0, (self.image_height - 1) / 2.0)

	def pixel_ray(self, u: float, v: float) -> NDArray[np.float64]:
		"""Unit camera-frame direction through pixel coordinate (u, v)."""
		u0, v0 = self.center
		ray = np.array([(u - u0) / self.focal_length, (v - v0) / self.focal_length, 1.0])
		return ray / np.linalg.norm(ray)

	def pixel_rays(self) -> NDArray[np.float64]:
		"""Row-major (height * width, 3) unit rays through every pixel center."""
		return _pixel_rays(self)


@lru_cache(maxsize=16)
def _pixel_rays(intrinsics: CameraIntrinsics) -> NDArray[np.float64]:
	u0, v0 = intrinsics.center
	f = intrinsics.focal_length
	v, u = np.mgrid[0 : intrinsics.image_height, 0 : intrinsics.image_width]
	rays = np.stack([(u - u0) / f, (v - v0) / f, np.ones_like(u, dtype=np.float64)], axis=-1).reshape(-1, 3)
	rays /= np.linalg.norm(rays, axis=1, keepdims=True)
	rays.setflags(write=False)
	return rays


@dataclass(frozen=True, eq=False)
class CameraArray:
	"""Reference camera at the end effector plus n rigidly offset cameras.

	`offsets` holds one row v^i per non-reference camera, in meters and in
	the end-effector frame. All cameras keep the reference orientation.
	"""

	offsets: NDArray[np.float64]
	intrinsics: CameraIntrinsics = CameraIntrinsics()

	def __post_init__(self):
		offsets = np.asarray(self.offsets, dtype=np.float64)
		if offsets.ndim != 2 or offsets.shape[1] != 3:
			raise ConfigurationError("camera offsets must be an n x 3 matrix")
		if offsets.shape[0] < 3:
			raise ConfigurationError("a camera array needs at least 3 offset cameras")
		if not np.all(np.isfinite(offsets)):
			raise ConfigurationError("camera offsets must be finite")
		if np.any(np.linalg.norm(offsets, axis=1) == 0.0):
			raise ConfigurationError("an offset camera coincides with the reference camera")
		if np.linalg.matrix_rank(offsets) < 3:
			raise ConfigurationError("camera offsets do not span 3D; the gradient would be unobservable")
		offsets.setflags(write=False)
		object.__setattr__(self, "offsets", offsets)

	@property
	def n(self) -> int:
		return self.offsets.shape[0]

	@cached_property
	def distances(self) -> NDArray[np.float64]:
		"""h_i = ||v^i|| per offset camera."""
		return np.linalg.norm(self.offsets, axis=1)

	@property
	def radius(self) -> float:
		"""Nominal array radius r: the largest camera distance."""
		return float(self.distances.max())

	def camera_poses(self, ee_pose: Pose) -> list[Pose]:
		"""World poses of the reference camera followed by the n offset cameras."""
		return [ee_pose] + [ee_pose.compose(Pose(offset, IDENTITY_QUATERNION)) for offset in self.offsets]


def default_array_layout(
	dx: float, dy: float, dz: float, intrinsics: CameraIntrinsics | None = None
) -> CameraArray:
	"""Eight cameras on a 3x3 grid around the reference, pushed dz forward.

	Corners sit at (+-dx, +-dy, dz), edge midpoints at (+-dx, 0, dz) and
	(0, +-dy, dz). Cameras are listed row by row, skipping the reference.
	"""
	if dx <= 0 or dy <= 0 or dz <= 0:
		raise ConfigurationError("array offsets dx, dy, dz must all be positive")

	offsets = [
		(i * dx, j * dy, dz) for j in (-1, 0, 1) for i in (-1, 0, 1) if (i, j) != (0, 0)
	]
	return CameraArray(np.array(offsets), intrinsics or CameraIntrinsics())


def array_for_radius(
	radius: float, intrinsics: CameraIntrinsics | None = None, base_offsets: ArrayLike = DEFAULT_ARRAY_OFFSETS
) -> CameraArray:
	"""Default layout scaled so that the corner cameras sit `radius` away."""
	if radius <= 0:
		raise ConfigurationError("array radius must be positive")
	base = np.asarray(base_offsets, dtype=np.float64)
	scale = radius / np.linalg.norm(base)
	dx, dy, dz = (base * scale).tolist()
	return default_array_layout(dx, dy, dz, intrinsics)
