"""
Target segmentation with a diagonal multivariate Gaussian in rotated-HSV
space, plus the two image measurements the servo loop needs: the
normalised target score p and the mask centroid.
"""

import math
from dataclasses import dataclass

import numpy as np
from matplotlib.colors import rgb_to_hsv
from numpy.typing import ArrayLike, NDArray

from move_to_see.controllers.setting import JsonDict, SettingController
from move_to_see.exceptions import ConfigurationError
from move_to_see.segment.constants import FEATURE_DIM, HUE_ROTATION

# (height, width) booleans, True = target
Mask = NDArray[np.bool_]


@dataclass(frozen=True)
class SegmentationModel(SettingController):
	mean: tuple[float, float, float] = (0.25, 0.9, 0.9)
	covariance_diag: tuple[float, float, float] = (0.004, 0.04, 0.04)
	threshold: float = 1.0

	def validate(self):
		if len(self.mean) != FEATURE_DIM or len(self.covariance_diag) != FEATURE_DIM:
			raise ConfigurationError("segmentation mean and covariance need 3 entries each")
		if any(v <= 0 for v in self.covariance_diag):
			raise ConfigurationError("covariance diagonal entries must be positive")
		if self.threshold <= 0:
			raise ConfigurationError("segmentation threshold must be positive")

	@classmethod
	def with_acceptance_radius(
		cls, mean=(0.25, 0.9, 0.9), covariance_diag=(0.004, 0.04, 0.04), radius: float = 3.0
	) -> "SegmentationModel":
		"""Model whose threshold accepts exactly the pixels within `radius` Mahalanobis units."""
		peak = _peak_density(covariance_diag)
		return cls(tuple(mean), tuple(covariance_diag), peak * math.exp(-0.5 * radius**2))

	@classmethod
	def from_config(cls, data: JsonDict | None) -> "SegmentationModel":
		"""Like from_dict, also accepting `acceptance_radius` in place of `threshold`."""
		data = dict(data or {})
		radius = data.pop("acceptance_radius", None)
		if radius is None:
			return cls.from_dict(data)
		if "threshold" in data:
			raise ConfigurationError("give either threshold or acceptance_radius, not both")
		base = cls.from_dict(data)
		return cls.with_acceptance_radius(base.mean, base.covariance_diag, radius)

	@property
	def covariance(self) -> NDArray[np.float64]:
		return np.diag(self.covariance_diag)

	@property
	def peak_density(self) -> float:
		return _peak_density(self.covariance_diag)

	def mahalanobis_cut(self) -> float:
		"""Squared Mahalanobis distance at which the density equals the threshold.

		Negative when the threshold exceeds the peak density (nothing passes).
		"""
		return -2.0 * math.log(self.threshold / self.peak_density)


def _peak_density(covariance_diag) -> float:
	return (2.0 * math.pi) ** (-FEATURE_DIM / 2.0) / math.sqrt(math.prod(covariance_diag))


def rgb_to_rotated_hsv(rgb: ArrayLike) -> NDArray[np.float64]:
	"""RGB in [0, 1] to (h', s, v) with the hue turned 90 degrees.

	Red moves from the 0/360 seam to h' = 0.25 so that red hues form one
	continuous cluster. Greys (s = 0) get h' = 0.25.
	"""
	hsv = rgb_to_hsv(np.asarray(rgb, dtype=np.float64))
	hsv[..., 0] = np.mod(hsv[..., 0] + HUE_ROTATION, 1.0)
	return hsv


def mahalanobis_sq(x: ArrayLike, model: SegmentationModel) -> NDArray[np.float64]:
	diff = np.asarray(x, dtype=np.float64) - np.asarray(model.mean)
	return np.sum(diff * diff / np.asarray(model.covariance_diag), axis=-1)


def gaussian_density(x: ArrayLike, model: SegmentationModel) -> NDArray[np.float64] | float:
	density = model.peak_density * np.exp(-0.5 * mahalanobis_sq(x, model))
	return float(density) if np.ndim(density) == 0 else density


def segment(image: NDArray[np.float64], model: SegmentationModel) -> Mask:
	"""Pixel is target iff its density is at least the threshold.

	Evaluated as the equivalent cut on the squared Mahalanobis distance.
	"""
	return mahalanobis_sq(rgb_to_rotated_hsv(image), model) <= model.mahalanobis_cut()


def target_score(mask: Mask) -> float:
	return np.count_nonzero(mask) / mask.size


def centroid(mask: Mask) -> tuple[float, float] | None:
	"""Mean (u, v) pixel coordinate of the target pixels, None when empty."""
	rows, cols = np.nonzero(mask)
	if rows.size == 0:
		return None
	return float(cols.mean()), float(rows.mean())


def validate_scene_colors(scene, model: SegmentationModel, margin: float = 1.0) -> None:
	"""Check that segmentation of the scene's flat colours is well posed.

	The target colour must be accepted; occluder and background colours must
	be rejected with a squared Mahalanobis distance beyond the cut by at
	least `margin`.
	"""
	cut = model.mahalanobis_cut()
	if mahalanobis_sq(rgb_to_rotated_hsv(scene.target.color), model) > cut:
		raise ConfigurationError("the segmentation model rejects the target colour")

	others = [("background", scene.background_color)]
	others.extend((f"occluder {i}", o.color) for i, o in enumerate(scene.occluders))
	for name, color in others:
		if mahalanobis_sq(rgb_to_rotated_hsv(color), model) <= cut + margin:
			raise ConfigurationError(f"the {name} colour is too close to the target model")
