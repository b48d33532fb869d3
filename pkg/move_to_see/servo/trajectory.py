import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from move_to_see.exceptions import ConfigurationError
from move_to_see.kinematics.arm import JointConfig
from move_to_see.scene.geometry import Pose, Vec3
from move_to_see.servo.constants import FOOTER_MARK, TERMINATIONS, TRAJECTORY_FIELDS
from move_to_see.servo.gradient import GradientEstimate


class Correction(NamedTuple):
	"""Roll/pitch centering correction in radians."""

	roll: float
	pitch: float
	target_lost: bool = False


@dataclass(frozen=True, eq=False)
class ServoStep:
	index: int
	ee_pose: Pose
	q: JointConfig
	p_ref: float
	f_ref: float
	m_ref: float
	# reference camera first; empty when reloaded from CSV
	scores: tuple[float, ...] = ()
	m_values: tuple[float, ...] = ()
	gradient: GradientEstimate | None = None
	correction: Correction = Correction(0.0, 0.0)
	centroid: tuple[float, float] | None = None

	@property
	def world_gradient(self) -> Vec3 | None:
		if self.gradient is None:
			return None
		return self.ee_pose.matrix @ self.gradient.grad


@dataclass(eq=False)
class TrajectoryLog:
	method: str
	steps: list[ServoStep] = field(default_factory=list)
	termination: str | None = None

	@property
	def a_start(self) -> float:
		return self.steps[0].p_ref

	@property
	def a_end(self) -> float:
		return self.steps[-1].p_ref

	@property
	def delta_a(self) -> float:
		"""Area change in percentage points of the image."""
		return 100.0 * (self.a_end - self.a_start)

	@property
	def f_n(self) -> float:
		return self.steps[-1].f_ref

	@property
	def positions(self) -> np.ndarray:
		return np.array([step.ee_pose.position for step in self.steps])

	def finish(self, termination: str) -> "TrajectoryLog":
		if termination not in TERMINATIONS:
			raise ConfigurationError(f"unknown termination {termination!r}")
		if not self.steps:
			raise ConfigurationError("a trajectory needs at least one step")
		self.termination = termination
		return self

	def to_csv(self, path: str | Path) -> None:
		with open(path, "w", newline="") as f:
			writer = csv.DictWriter(f, fieldnames=TRAJECTORY_FIELDS)
			writer.writeheader()
			for step in self.steps:
				writer.writerow(_step_row(step))
			writer.writerow(
				{
					"k": FOOTER_MARK,
					"termination": self.termination,
					"a_start": self.a_start,
					"a_end": self.a_end,
					"f_n": self.f_n,
				}
			)

	@classmethod
	def from_csv(cls, path: str | Path, method: str = "") -> "TrajectoryLog":
		"""Reload a trajectory written by to_csv.

		Per-camera scores and manipulabilities are not stored and come back empty.
		"""
		with open(path, newline="") as f:
			rows = list(csv.DictReader(f))
		if not rows or rows[-1]["k"] != FOOTER_MARK:
			raise ConfigurationError(f"{path}: missing trajectory footer row")

		log = cls(method=method, steps=[_row_step(row) for row in rows[:-1]])
		return log.finish(rows[-1]["termination"])


def _step_row(step: ServoStep) -> dict:
	row = {"k": step.index}
	row.update(zip(("x", "y", "z"), step.ee_pose.position.tolist(), strict=True))
	row.update(zip(("qx", "qy", "qz", "qw"), step.ee_pose.quaternion.tolist(), strict=True))
	row.update((f"q{i}", value) for i, value in enumerate(step.q.tolist(), start=1))
	row.update(p_ref=step.p_ref, f_ref=step.f_ref, m_ref=step.m_ref)
	row.update(roll=step.correction.roll, pitch=step.correction.pitch)

	world = step.world_gradient
	if world is not None:
		row.update(zip(("grad_x", "grad_y", "grad_z"), world.tolist(), strict=True))
		row.update(grad_norm=step.gradient.norm, residual=step.gradient.residual_norm)
	return row


def _row_step(row: dict) -> ServoStep:
	def floats(*names):
		return [float(row[name]) for name in names]

	pose = Pose(floats("x", "y", "z"), floats("qx", "qy", "qz", "qw"))
	gradient = None
	if row["grad_x"]:
		world = np.array(floats("grad_x", "grad_y", "grad_z"))
		gradient = GradientEstimate(grad=pose.matrix.T @ world, residual_norm=float(row["residual"]))

	return ServoStep(
		index=int(row["k"]),
		ee_pose=pose,
		q=np.array(floats(*(f"q{i}" for i in range(1, 8)))),
		p_ref=float(row["p_ref"]),
		f_ref=float(row["f_ref"]),
		m_ref=float(row["m_ref"]) if row["m_ref"] else math.nan,
		gradient=gradient,
		correction=Correction(float(row["roll"]), float(row["pitch"])),
	)
