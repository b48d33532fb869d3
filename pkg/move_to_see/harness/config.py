"""
Experiment configuration: one JSON document with `scene`, `camera`,
`array`, `segmentation`, `servo`, `arm` and optional `sweep` sections.
Missing sections fall back to their defaults.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from move_to_see.controllers.setting import JsonDict, SettingController, load_json
from move_to_see.exceptions import ConfigurationError
from move_to_see.harness.constants import PACKAGE_CONFIG_DIR
from move_to_see.harness.sweep import SweepSpec
from move_to_see.kinematics.arm import ArmModel, load_arm
from move_to_see.kinematics.kinematics import forward_kinematics
from move_to_see.render.camera import CameraArray, CameraIntrinsics, array_for_radius
from move_to_see.render.constants import DEFAULT_ARRAY_OFFSETS
from move_to_see.scene.scene import SceneSettings
from move_to_see.segment.segmentation import SegmentationModel
from move_to_see.servo.controller import ServoConfig

logger = logging.getLogger(__name__)

SECTIONS = ("scene", "camera", "array", "segmentation", "servo", "arm", "sweep")


@dataclass(frozen=True)
class ArraySettings(SettingController):
	"""Either a corner radius for the default grid layout or explicit offsets."""

	radius: float | None = None
	offsets: tuple[tuple[float, float, float], ...] | None = None

	def validate(self):
		if self.radius is not None and self.offsets is not None:
			raise ConfigurationError("give either an array radius or explicit offsets, not both")
		if self.radius is not None and self.radius <= 0:
			raise ConfigurationError("array radius must be positive")

	def build(self, intrinsics: CameraIntrinsics, radius: float | None = None) -> CameraArray:
		"""Array for a trial; `radius` from a sweep cell overrides this section."""
		if radius is not None:
			return array_for_radius(radius, intrinsics)
		if self.offsets is not None:
			return CameraArray(np.array(self.offsets), intrinsics)
		if self.radius is not None:
			return array_for_radius(self.radius, intrinsics)
		return array_for_radius(float(np.linalg.norm(DEFAULT_ARRAY_OFFSETS)), intrinsics)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
	scene: SceneSettings
	camera: CameraIntrinsics
	array: ArraySettings
	segmentation: SegmentationModel
	servo: ServoConfig
	arm: ArmModel
	sweep: SweepSpec
	source: Path | None = None


def resolve_scene_settings(settings: SceneSettings, arm: ArmModel) -> SceneSettings:
	"""Fill in anchor and start camera from the arm's start pose."""
	start = forward_kinematics(arm, arm.start_q)
	changes = {}
	if settings.start_camera is None:
		changes["start_camera"] = tuple(start.position.tolist())
	if settings.anchor is None:
		anchor = start.position + settings.start_standoff * start.optical_axis
		changes["anchor"] = tuple(anchor.tolist())
	return settings.replace(**changes) if changes else settings


def load_experiment(source: str | Path | JsonDict) -> ExperimentConfig:
	if isinstance(source, dict):
		data, base_dir, path = source, Path.cwd(), None
	else:
		path = Path(source)
		data, base_dir = load_json(path), path.parent

	unknown = sorted(set(data) - set(SECTIONS))
	if unknown:
		raise ConfigurationError(f"unknown config section(s) {', '.join(unknown)}")

	arm = load_arm(_arm_source(data.get("arm"), base_dir))
	config = ExperimentConfig(
		scene=resolve_scene_settings(SceneSettings.from_dict(data.get("scene")), arm),
		camera=CameraIntrinsics.from_dict(data.get("camera")),
		array=ArraySettings.from_dict(data.get("array")),
		segmentation=SegmentationModel.from_config(data.get("segmentation")),
		servo=ServoConfig.from_dict(data.get("servo")),
		arm=arm,
		sweep=SweepSpec.from_dict(data.get("sweep")),
		source=path,
	)
	logger.info("loaded experiment %s (%d trials per method)", path or "<inline>", config.sweep.trial_count)
	return config


def _arm_source(entry, base_dir: Path):
	"""Arm paths resolve against the config's directory, then the shipped configs."""
	if entry is None or isinstance(entry, dict):
		return entry
	candidate = base_dir / entry
	if candidate.exists():
		return candidate
	return PACKAGE_CONFIG_DIR / entry
