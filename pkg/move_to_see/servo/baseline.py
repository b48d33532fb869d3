"""
Single RGB-D camera baseline: re-aim at the target centroid every step and
move along the ray toward the point seen there, stopping short of it.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike

from move_to_see.kinematics.arm import ArmModel, as_joint_config
from move_to_see.kinematics.kinematics import forward_kinematics, manipulability
from move_to_see.render.camera import CameraIntrinsics
from move_to_see.render.renderer import add_pixel_noise, camera_seeds, render
from move_to_see.scene.scene import HitRecord, SceneModel, ray_hit
from move_to_see.segment.segmentation import SegmentationModel, centroid, segment, target_score
from move_to_see.servo.constants import BLOCKED, MAX_STEPS, NAIVE, TARGET_LOST
from move_to_see.servo.controller import (
	ServoConfig,
	apply_step,
	cap_step,
	finish_run,
	manipulability_scale,
	move_to,
	should_stop,
	step_seed,
)
from move_to_see.servo.gradient import objective
from move_to_see.servo.trajectory import Correction, ServoStep, TrajectoryLog

logger = logging.getLogger(__name__)


def approach_step(direction: np.ndarray, hit: HitRecord, config: ServoConfig) -> np.ndarray | None:
	"""Step along the unit centroid ray, ending at least min_clearance short of the hit.

	None when the surface on the ray is already that close.
	"""
	limit = config.max_step
	if math.isfinite(hit.distance):
		room = hit.distance - config.min_clearance
		if room <= 0:
			return None
		limit = min(limit, room)
	return cap_step(config.alpha * direction, limit)


def run_baseline(
	scene: SceneModel,
	arm: ArmModel,
	rgbd_camera: CameraIntrinsics,
	seg_model: SegmentationModel,
	config: ServoConfig,
	q_start: ArrayLike | None = None,
) -> TrajectoryLog:
	"""Closed-loop straight-line approach toward the segmented target.

	The depth reading along the centroid ray is noise-free and caps every
	step so the camera halts min_clearance short of the surface seen there.
	An occluder covering the centroid therefore pulls the approach onto the
	occluder and ends it blocked. Orientation is kept fixed and there is no
	gradient stop.
	"""
	q = arm.start_q if q_start is None else as_joint_config(q_start)
	pose = forward_kinematics(arm, q)
	m_scale = manipulability_scale(arm, q, config)

	log = TrajectoryLog(method=NAIVE)
	lost = 0

	for k in range(config.max_steps):
		# same stream as the reference camera of the array at this step
		seed = camera_seeds(step_seed(config.rng_seed, k), 1)[0]
		image = add_pixel_noise(render(pose, rgbd_camera, scene), config.sigma, seed)
		mask = segment(image, seg_model)
		p_ref = target_score(mask)
		m_ref = manipulability(arm, q) / m_scale
		target_centroid = centroid(mask)

		log.steps.append(
			ServoStep(
				index=k,
				ee_pose=pose,
				q=q,
				p_ref=p_ref,
				f_ref=objective(p_ref, m_ref, config.w1, config.w2),
				m_ref=m_ref,
				scores=(p_ref,),
				m_values=(m_ref,),
				correction=Correction(0.0, 0.0, target_lost=target_centroid is None),
				centroid=target_centroid,
			)
		)
		logger.debug("step %d: p_ref %.4f", k, p_ref)

		lost = lost + 1 if target_centroid is None else 0
		if lost and (k == 0 or lost >= config.lost_after):
			return finish_run(log, TARGET_LOST)

		reason = should_stop([], p_ref, config)
		if reason:
			return finish_run(log, reason)
		if k == config.max_steps - 1:
			break
		if target_centroid is None:
			# hold position until the target reappears or counts as lost
			continue

		direction = pose.matrix @ rgbd_camera.pixel_ray(*target_centroid)
		hit = ray_hit(pose.position, direction, scene)
		logger.debug("step %d: centroid ray hits %s at %.4f m", k, hit.kind, hit.distance)

		world_step = approach_step(direction, hit, config)
		if world_step is None:
			return finish_run(log, BLOCKED)
		next_pose = apply_step(pose, world_step, Correction(0.0, 0.0))
		q_next, reason = move_to(arm, scene, next_pose, q, config)
		if reason:
			return finish_run(log, reason)
		q = q_next
		pose = forward_kinematics(arm, q)

	return finish_run(log, MAX_STEPS)
