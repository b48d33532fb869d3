import json
import os
import unittest
from typing import ClassVar

import numpy as np
from scipy.spatial.transform import Rotation

from move_to_see.kinematics.arm import load_arm
from move_to_see.kinematics.kinematics import forward_kinematics
from move_to_see.render.camera import CameraIntrinsics
from move_to_see.scene.geometry import Pose, unit
from move_to_see.scene.scene import SceneModel, SceneSettings, build_scene
from move_to_see.segment.segmentation import SegmentationModel


def facing_pose(position, direction=(1.0, 0.0, 0.0)) -> Pose:
	"""Camera pose at `position` looking along `direction` with world +z as image up."""
	z = unit(direction)
	x = unit(np.cross(z, (0.0, 0.0, 1.0)))
	y = np.cross(z, x)
	return Pose.from_rotation(position, Rotation.from_matrix(np.column_stack([x, y, z])))


class TestCase(unittest.TestCase):
	"""Shared fixtures: a start camera 0.35 m in front of the target, looking along +x."""

	scene_config: ClassVar = {
		"anchor": [1.0, 0.0, 0.5],
		"start_camera": [0.65, 0.0, 0.5],
		"occluder_standoff": 0.15,
		"occluder_half_extent": 0.1,
	}

	@classmethod
	def setUpClass(cls):
		cls.arm = load_arm()
		cls.intrinsics = CameraIntrinsics()
		cls.seg_model = SegmentationModel.with_acceptance_radius(radius=3.0)
		cls.scene_settings = SceneSettings.from_dict(cls.scene_config)
		cls.start_pose = facing_pose(cls.scene_settings.start_camera)

		# same placement, anchored on the arm's start pose
		arm_start = forward_kinematics(cls.arm, cls.arm.start_q)
		cls.arm_start_pose = arm_start
		cls.arm_scene_settings = SceneSettings(
			anchor=tuple((arm_start.position + 0.35 * arm_start.optical_axis).tolist()),
			start_camera=tuple(arm_start.position.tolist()),
		)

	def make_scene(self, target_offset=(0.0, 0.0), occluder_offset=(0.0, 0.0), theta=0.0, **changes) -> SceneModel:
		settings = self.scene_settings.replace(**changes) if changes else self.scene_settings
		return build_scene(target_offset, occluder_offset, theta, settings)

	def unoccluded_scene(self) -> SceneModel:
		return self.make_scene(include_occluder=False)

	def make_arm_scene(self, target_offset=(0.0, 0.0), occluder_offset=(0.0, 0.0), theta=0.0, **changes):
		settings = self.arm_scene_settings.replace(**changes) if changes else self.arm_scene_settings
		return build_scene(target_offset, occluder_offset, theta, settings)

	def load_fixture(self, name):
		with open(os.path.dirname(__file__) + f"/fixtures/{name}.json", "rb") as f:
			data = f.read()
		return json.loads(data)
