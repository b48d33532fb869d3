"""
Flat-colour pinhole ray casting, the additive pixel-noise model and the
camera-array capture used by the servo loop.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from PIL import Image as PILImage

from move_to_see.exceptions import ConfigurationError
from move_to_see.render.camera import CameraArray, CameraIntrinsics
from move_to_see.render.constants import PPM_MAX_VALUE
from move_to_see.scene.geometry import Pose
from move_to_see.scene.scene import SceneModel, cast_rays

# (height, width, 3) float array, channels in [0, 1]
Image = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class ArrayViews:
	"""Images captured by one array shot; index 0 is the reference camera."""

	poses: list[Pose]
	images: list[Image]

	@property
	def reference(self) -> Image:
		return self.images[0]


def render(camera_pose: Pose, intrinsics: CameraIntrinsics, scene: SceneModel) -> Image:
	rays = intrinsics.pixel_rays() @ camera_pose.matrix.T
	codes, _ = cast_rays(camera_pose.position, rays, scene)
	colors = scene.color_table()[codes + 1]
	return colors.reshape(intrinsics.image_height, intrinsics.image_width, 3)


def add_pixel_noise(image: Image, sigma: float, rng_seed) -> Image:
	"""I.i.d. zero-mean Gaussian noise per channel, clamped to [0, 1].

	`rng_seed` is anything numpy.random.default_rng accepts.
	"""
	if sigma < 0:
		raise ConfigurationError("pixel noise sigma must be non-negative")
	if sigma == 0:
		return image.copy()

	rng = np.random.default_rng(rng_seed)
	noisy = image + rng.normal(0.0, sigma, size=image.shape)
	return np.clip(noisy, 0.0, 1.0)


def camera_seeds(rng_seed, count: int) -> list[np.random.SeedSequence]:
	"""Independent per-camera noise streams derived from one seed."""
	return np.random.SeedSequence(rng_seed).spawn(count)


def array_views(ee_pose: Pose, array: CameraArray, scene: SceneModel, sigma: float, rng_seed) -> ArrayViews:
	poses = array.camera_poses(ee_pose)
	seeds = camera_seeds(rng_seed, len(poses))
	images = [
		add_pixel_noise(render(pose, array.intrinsics, scene), sigma, seed)
		for pose, seed in zip(poses, seeds, strict=True)
	]
	return ArrayViews(poses=poses, images=images)


def to_uint8(image: Image) -> NDArray[np.uint8]:
	return np.round(np.clip(image, 0.0, 1.0) * PPM_MAX_VALUE).astype(np.uint8)


def write_ppm(image: Image, path: str | Path) -> None:
	"""Binary (P6) dump of an image, 8 bits per channel."""
	PILImage.fromarray(to_uint8(image)).save(path, format="PPM")
