"""
Objective evaluation and least-squares gradient recovery from the
finite differences sampled by the camera array.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from move_to_see.exceptions import ConfigurationError
from move_to_see.render.camera import CameraArray
from move_to_see.scene.geometry import Vec3


def objective(p: float, m: float, w1: float, w2: float) -> float:
	"""f = w1 p + w2 m. With w2 = 0 the manipulability term is dropped, even if m is NaN."""
	if w2 == 0:
		return w1 * p
	return w1 * p + w2 * m


def direction_matrix(array: CameraArray) -> NDArray[np.float64]:
	"""Raw camera offset vectors, one row per offset camera (end-effector frame)."""
	V = np.array(array.offsets, dtype=np.float64)
	if np.linalg.matrix_rank(V) < 3:
		raise ConfigurationError("direction matrix must have rank 3")
	return V


def delta_f(f_ref: float, f_i: ArrayLike) -> NDArray[np.float64]:
	return np.asarray(f_i, dtype=np.float64) - f_ref


@dataclass(frozen=True, eq=False)
class GradientEstimate:
	# end-effector frame, objective units per meter
	grad: Vec3
	residual_norm: float
	per_camera_delta_f: tuple[float, ...] = ()

	@property
	def norm(self) -> float:
		return float(np.linalg.norm(self.grad))


def estimate_gradient(V: ArrayLike, delta: ArrayLike) -> GradientEstimate:
	"""Least-squares solution of V g = delta through a reduced QR factorisation."""
	V = np.asarray(V, dtype=np.float64)
	delta = np.asarray(delta, dtype=np.float64)
	if V.ndim != 2 or V.shape[1] != 3 or V.shape[0] != delta.shape[0]:
		raise ConfigurationError("direction matrix must be n x 3 and match the difference vector")

	Q, R = np.linalg.qr(V)
	if np.min(np.abs(np.diag(R))) <= 1e-12 * np.max(np.abs(np.diag(R))):
		raise ConfigurationError("direction matrix is rank deficient")

	grad = scipy.linalg.solve_triangular(R, Q.T @ delta)
	residual = float(np.linalg.norm(V @ grad - delta))
	if not (np.all(np.isfinite(grad)) and math.isfinite(residual)):
		raise ConfigurationError("objective differences must be finite")
	return GradientEstimate(grad=grad, residual_norm=residual, per_camera_delta_f=tuple(delta.tolist()))
