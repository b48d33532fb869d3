"""
The array servo loop: capture n+1 views, score them, estimate the
objective gradient from the finite differences, step along it and keep
the target centred with roll/pitch corrections.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.transform import Rotation

from move_to_see.controllers.setting import SettingController
from move_to_see.exceptions import ConfigurationError, IKFailure
from move_to_see.kinematics.arm import ArmModel, JointConfig, as_joint_config
from move_to_see.kinematics.kinematics import (
	forward_kinematics,
	inverse_kinematics,
	manipulability,
	manipulability_at_point,
)
from move_to_see.render.camera import CameraArray, CameraIntrinsics
from move_to_see.render.renderer import array_views
from move_to_see.scene.geometry import Pose
from move_to_see.scene.scene import SceneModel, clearance
from move_to_see.segment.segmentation import SegmentationModel, centroid, segment, target_score
from move_to_see.servo.constants import (
	BLOCKED,
	GRADIENT_CONVERGED,
	IK_FAILED,
	MAX_STEPS,
	PROPOSED,
	SCORE_REACHED,
	TARGET_LOST,
)
from move_to_see.servo.gradient import GradientEstimate, delta_f, direction_matrix, estimate_gradient, objective
from move_to_see.servo.trajectory import Correction, ServoStep, TrajectoryLog

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServoConfig(SettingController):
	w1: float = 1.0
	w2: float = 0.0
	# meters per unit gradient
	alpha: float = 0.01
	epsilon: float = 0.05
	p_max: float = 0.4
	window_m: int = 3
	max_steps: int = 200
	sigma: float = 0.001
	rng_seed: int = 0
	max_step: float = 0.02
	min_clearance: float = 0.02
	lost_after: int = 3
	orientation_gain: float = 1.0
	normalize_manipulability: bool = True

	def validate(self):
		if self.w1 < 0 or self.w2 < 0 or abs(self.w1 + self.w2 - 1.0) > 1e-12:
			raise ConfigurationError("objective weights must be non-negative and sum to 1")
		if self.alpha < 0:
			raise ConfigurationError("alpha must be non-negative")
		if self.epsilon < 0:
			raise ConfigurationError("epsilon must be non-negative")
		if not 0.0 < self.p_max <= 1.0:
			raise ConfigurationError("p_max must lie in (0, 1]")
		if self.window_m < 1 or self.max_steps < 1 or self.lost_after < 1:
			raise ConfigurationError("window_m, max_steps and lost_after must be at least 1")
		if self.sigma < 0:
			raise ConfigurationError("pixel noise sigma must be non-negative")
		if self.max_step <= 0 or self.min_clearance < 0:
			raise ConfigurationError("max_step must be positive and min_clearance non-negative")


def step_seed(rng_seed: int, k: int) -> tuple[int, int]:
	"""Noise entropy of step k; spawned per camera by the renderer."""
	return (rng_seed, k)


def roll_pitch_correction(target_centroid: tuple[float, float] | None, intrinsics: CameraIntrinsics) -> Correction:
	"""Angles that turn the optical axis toward the target centroid.

	Pitch turns about the camera y axis (positive toward image right), roll
	about the camera x axis (positive toward image bottom). Each is the
	centroid offset from the principal point as a fraction of the image
	extent, times the field of view along that axis.

	Pixel centres sit at integer coordinates and the principal point is
	((width - 1) / 2, (height - 1) / 2), so u = width lies half a pixel past
	the last column and turns by slightly more than half the field of view.
	"""
	if target_centroid is None:
		return Correction(0.0, 0.0, target_lost=True)

	u, v = target_centroid
	cx, cy = intrinsics.center
	pitch = (u - cx) / intrinsics.image_width * intrinsics.horizontal_fov
	roll = (v - cy) / intrinsics.image_height * intrinsics.vertical_fov
	return Correction(roll, pitch)


def should_stop(history: Sequence[GradientEstimate], p_ref: float, config: ServoConfig) -> str | None:
	if p_ref >= config.p_max:
		return SCORE_REACHED
	if len(history) >= config.window_m:
		window = history[-config.window_m :]
		if np.mean([g.norm for g in window]) <= config.epsilon:
			return GRADIENT_CONVERGED
	return None


def apply_step(pose: Pose, world_step: ArrayLike, correction: Correction, gain: float = 1.0) -> Pose:
	"""Translate by world_step, then apply the roll/pitch correction in the camera frame."""
	rotation = (
		pose.rotation
		* Rotation.from_euler("y", gain * correction.pitch)
		* Rotation.from_euler("x", -gain * correction.roll)
	)
	return Pose.from_rotation(pose.position + np.asarray(world_step, dtype=np.float64), rotation)


def cap_step(step: np.ndarray, max_step: float) -> np.ndarray:
	length = float(np.linalg.norm(step))
	if length > max_step:
		return step * (max_step / length)
	return step


def move_to(
	arm: ArmModel, scene: SceneModel, target: Pose, q: JointConfig, config: ServoConfig
) -> tuple[JointConfig | None, str | None]:
	"""Joint configuration reaching `target`, or the termination that prevents the move."""
	if clearance(target.position, scene) < config.min_clearance:
		return None, BLOCKED

	result = inverse_kinematics(arm, target, q)
	if not result.success:
		logger.info("IK failed for the next pose (residual %.3g m)", result.residual)
		return None, IK_FAILED
	return result.q, None


def manipulability_scale(arm: ArmModel, q: JointConfig, config: ServoConfig) -> float:
	if not config.normalize_manipulability:
		return 1.0
	m0 = manipulability(arm, q)
	if m0 <= 0:
		raise ConfigurationError("the start configuration is singular, manipulability cannot be normalised")
	return m0


def run_3dmts(
	scene: SceneModel,
	arm: ArmModel,
	array: CameraArray,
	seg_model: SegmentationModel,
	config: ServoConfig,
	q_start: ArrayLike | None = None,
) -> TrajectoryLog:
	"""Run the array servo loop from q_start (the arm's start configuration by default)."""
	q = arm.start_q if q_start is None else as_joint_config(q_start)
	pose = forward_kinematics(arm, q)
	V = direction_matrix(array)
	m_scale = manipulability_scale(arm, q, config)

	log = TrajectoryLog(method=PROPOSED)
	history: list[GradientEstimate] = []
	lost = 0

	for k in range(config.max_steps):
		views = array_views(pose, array, scene, config.sigma, step_seed(config.rng_seed, k))
		masks = [segment(image, seg_model) for image in views.images]
		scores = [target_score(mask) for mask in masks]

		m_values = [manipulability(arm, q) / m_scale] + [math.nan] * array.n
		ik_error = None
		if config.w2 > 0:
			try:
				for i, camera in enumerate(views.poses[1:], start=1):
					m_values[i] = manipulability_at_point(arm, camera.position, pose.rotation, q) / m_scale
			except IKFailure as e:
				ik_error = e

		f = [objective(p, m, config.w1, config.w2) for p, m in zip(scores, m_values, strict=True)]
		gradient = None if ik_error else estimate_gradient(V, delta_f(f[0], f[1:]))
		target_centroid = centroid(masks[0])
		correction = roll_pitch_correction(target_centroid, array.intrinsics)

		log.steps.append(
			ServoStep(
				index=k,
				ee_pose=pose,
				q=q,
				p_ref=scores[0],
				f_ref=f[0],
				m_ref=m_values[0],
				scores=tuple(scores),
				m_values=tuple(m_values),
				gradient=gradient,
				correction=correction,
				centroid=target_centroid,
			)
		)
		logger.debug("step %d: p_ref %.4f, |grad| %.4f", k, scores[0], gradient.norm if gradient else math.nan)

		if ik_error is not None:
			logger.info("offset camera unreachable at step %d: %s", k, ik_error.message)
			return finish_run(log, IK_FAILED)

		lost = lost + 1 if correction.target_lost else 0
		if lost and (k == 0 or lost >= config.lost_after):
			return finish_run(log, TARGET_LOST)

		history.append(gradient)
		reason = should_stop(history, scores[0], config)
		if reason:
			return finish_run(log, reason)
		if k == config.max_steps - 1:
			break

		world_step = cap_step(pose.matrix @ (config.alpha * gradient.grad), config.max_step)
		next_pose = apply_step(pose, world_step, correction, config.orientation_gain)
		q_next, reason = move_to(arm, scene, next_pose, q, config)
		if reason:
			return finish_run(log, reason)
		q = q_next
		pose = forward_kinematics(arm, q)

	return finish_run(log, MAX_STEPS)


def finish_run(log: TrajectoryLog, termination: str) -> TrajectoryLog:
	logger.info(
		"%s run ended with %s after %d steps (A %.4f -> %.4f)",
		log.method,
		termination,
		len(log.steps),
		log.a_start,
		log.a_end,
	)
	return log.finish(termination)
