"""
Forward kinematics, geometric Jacobian, Yoshikawa manipulability and a
damped least-squares inverse kinematics solver for ArmModel.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from move_to_see.exceptions import IKFailure
from move_to_see.kinematics.arm import ArmModel, JointConfig, as_joint_config
from move_to_see.kinematics.constants import (
	IK_DAMPING,
	IK_MAX_ITERATIONS,
	IK_ORIENTATION_TOLERANCE,
	IK_POSITION_TOLERANCE,
)
from move_to_see.scene.geometry import Pose, as_vec3

logger = logging.getLogger(__name__)

# 6 x 7: linear velocity rows then angular velocity rows
Jacobian = NDArray[np.float64]


def dh_transform(a: float, alpha: float, d: float, theta: float) -> NDArray[np.float64]:
	"""Rz(theta) Tz(d) Tx(a) Rx(alpha)."""
	ct, st = math.cos(theta), math.sin(theta)
	ca, sa = math.cos(alpha), math.sin(alpha)
	return np.array(
		[
			[ct, -st * ca, st * sa, a * ct],
			[st, ct * ca, -ct * sa, a * st],
			[0.0, sa, ca, d],
			[0.0, 0.0, 0.0, 1.0],
		]
	)


def joint_frames(arm: ArmModel, q: ArrayLike) -> list[NDArray[np.float64]]:
	"""World transforms of frames 0..7; joint i turns about the z axis of frame i-1."""
	q = as_joint_config(q)
	frames = [arm.base_pose.homogeneous()]
	for (a, alpha, d, offset), qi in zip(arm.dh_rows, q, strict=True):
		frames.append(frames[-1] @ dh_transform(a, alpha, d, qi + offset))
	return frames


def forward_kinematics(arm: ArmModel, q: ArrayLike) -> Pose:
	flange = joint_frames(arm, q)[-1]
	return Pose.from_homogeneous(flange @ arm.tool.homogeneous())


def jacobian(arm: ArmModel, q: ArrayLike) -> Jacobian:
	frames = joint_frames(arm, q)
	tool_point = (frames[-1] @ arm.tool.homogeneous())[:3, 3]

	J = np.zeros((6, len(arm.dh_rows)))
	for i, frame in enumerate(frames[:-1]):
		z = frame[:3, 2]
		J[:3, i] = np.cross(z, tool_point - frame[:3, 3])
		J[3:, i] = z
	return J


def manipulability_from_jacobian(J: ArrayLike) -> float:
	"""sqrt(det(J J^T)) as the product of the eigenvalues of J J^T.

	Round-off negatives are clamped to zero.
	"""
	J = np.asarray(J, dtype=np.float64)
	eigenvalues = np.clip(np.linalg.eigvalsh(J @ J.T), 0.0, None)
	return float(math.sqrt(np.prod(eigenvalues)))


def manipulability(arm: ArmModel, q: ArrayLike) -> float:
	return manipulability_from_jacobian(jacobian(arm, q))


def manipulability_lu(arm: ArmModel, q: ArrayLike) -> float:
	"""Same measure computed through an LU factorisation of J J^T."""
	J = jacobian(arm, q)
	lu, piv = scipy.linalg.lu_factor(J @ J.T)
	sign = (-1.0) ** np.count_nonzero(piv != np.arange(len(piv)))
	det = sign * float(np.prod(np.diag(lu)))
	return math.sqrt(max(det, 0.0))


@dataclass(frozen=True, eq=False)
class IKResult:
	q: JointConfig
	success: bool
	iterations: int
	residual: float
	orientation_residual: float
	within_limits: bool

	def raise_for_status(self) -> "IKResult":
		if not self.success:
			raise IKFailure(
				f"inverse kinematics did not converge after {self.iterations} iterations "
				f"(residual {self.residual:.3g} m, {self.orientation_residual:.3g} rad)",
				residual=self.residual,
				q=self.q,
			)
		return self


def pose_error(current: Pose, target: Pose) -> NDArray[np.float64]:
	"""Six-vector (position error, rotation-vector error) taking current to target."""
	rot_error = (target.rotation * current.rotation.inv()).as_rotvec()
	return np.concatenate([target.position - current.position, rot_error])


def inverse_kinematics(
	arm: ArmModel,
	target: Pose,
	q_seed: ArrayLike,
	damping: float = IK_DAMPING,
	max_iterations: int = IK_MAX_ITERATIONS,
	position_tolerance: float = IK_POSITION_TOLERANCE,
	orientation_tolerance: float = IK_ORIENTATION_TOLERANCE,
) -> IKResult:
	"""Damped least-squares iteration from q_seed.

	Joint limits are not enforced; a solution outside them is flagged through
	`within_limits`.
	"""
	q = as_joint_config(q_seed).copy()
	damping_sq = damping**2 * np.eye(6)

	iterations = 0
	while True:
		error = pose_error(forward_kinematics(arm, q), target)
		pos_res = float(np.linalg.norm(error[:3]))
		rot_res = float(np.linalg.norm(error[3:]))
		converged = pos_res < position_tolerance and rot_res < orientation_tolerance
		if converged or iterations >= max_iterations:
			break

		J = jacobian(arm, q)
		q = q + J.T @ np.linalg.solve(J @ J.T + damping_sq, error)
		iterations += 1

	if not converged:
		logger.debug("IK stopped after %d iterations, residual %.3g m", iterations, pos_res)

	return IKResult(
		q=q,
		success=converged,
		iterations=iterations,
		residual=pos_res,
		orientation_residual=rot_res,
		within_limits=arm.within_limits(q),
	)


def manipulability_at_point(
	arm: ArmModel, ee_point: ArrayLike, ee_orientation: ArrayLike | Rotation, q_seed: ArrayLike
) -> float:
	"""Manipulability at the IK solution placing the end effector at a point.

	`ee_orientation` is a scalar-last quaternion or a Rotation. Raises
	IKFailure when the point cannot be reached.
	"""
	if isinstance(ee_orientation, Rotation):
		target = Pose.from_rotation(as_vec3(ee_point, "ee point"), ee_orientation)
	else:
		target = Pose(ee_point, ee_orientation)

	result = inverse_kinematics(arm, target, q_seed).raise_for_status()
	return manipulability(arm, result.q)
