import itertools
import math
from dataclasses import dataclass

import numpy as np

from move_to_see.controllers.setting import JsonDict, SettingController
from move_to_see.exceptions import ConfigurationError
from move_to_see.servo.constants import METHODS


@dataclass(frozen=True)
class SweepSpec(SettingController):
	"""Parameter grid of an experiment.

	Each list holds the values one parameter takes; the grid is their
	Cartesian product, replicated `replications` times with distinct seeds.
	A radius of None keeps the layout of the config's `array` section.
	Weights, radius and sigma override the servo and array sections.
	"""

	target_y: tuple[float, ...] = (0.0,)
	target_z: tuple[float, ...] = (0.0,)
	occ_y: tuple[float, ...] = (0.0,)
	occ_z: tuple[float, ...] = (0.0,)
	theta: tuple[float, ...] = (0.0,)
	weights: tuple[tuple[float, float], ...] = ((1.0, 0.0),)
	radius: tuple[float | None, ...] = (None,)
	sigma: tuple[float, ...] = (0.001,)
	replications: int = 1
	base_seed: int = 0
	methods: tuple[str, ...] = METHODS

	def validate(self):
		for name in ("target_y", "target_z", "occ_y", "occ_z", "theta", "weights", "radius", "sigma"):
			if not getattr(self, name):
				raise ConfigurationError(f"sweep list {name!r} is empty")
		if any(len(pair) != 2 for pair in self.weights):
			raise ConfigurationError("every sweep weight entry is a (w1, w2) pair")
		if self.replications < 1:
			raise ConfigurationError("replications must be at least 1")
		if not self.methods or any(m not in METHODS for m in self.methods):
			raise ConfigurationError(f"sweep methods must be drawn from {', '.join(METHODS)}")

	@property
	def cell_count(self) -> int:
		sizes = [len(getattr(self, name)) for name in ("target_y", "target_z", "occ_y", "occ_z", "theta")]
		return math.prod(sizes) * len(self.weights) * len(self.radius) * len(self.sigma)

	@property
	def trial_count(self) -> int:
		return self.cell_count * self.replications


@dataclass(frozen=True)
class TrialDescriptor:
	cell_index: int
	replicate: int
	target_y: float
	target_z: float
	occ_y: float
	occ_z: float
	theta: float
	w1: float
	w2: float
	radius: float | None
	sigma: float
	seed: int

	@property
	def trial_id(self) -> str:
		return f"{self.cell_index:04d}-{self.replicate}"

	def cell_params(self) -> JsonDict:
		return {
			"target_y": self.target_y,
			"target_z": self.target_z,
			"occ_y": self.occ_y,
			"occ_z": self.occ_z,
			"theta": self.theta,
			"w1": self.w1,
			"w2": self.w2,
			"radius": self.radius,
			"sigma": self.sigma,
		}


def derive_seed(base_seed: int, cell_index: int, replicate: int = 0) -> int:
	return int(np.random.SeedSequence([base_seed, cell_index, replicate]).generate_state(1)[0])


def expand_sweep(spec: SweepSpec) -> list[TrialDescriptor]:
	cells = itertools.product(
		spec.target_y,
		spec.target_z,
		spec.occ_y,
		spec.occ_z,
		spec.theta,
		spec.weights,
		spec.radius,
		spec.sigma,
	)

	descriptors = []
	for index, (ty, tz, oy, oz, theta, (w1, w2), radius, sigma) in enumerate(cells):
		for replicate in range(spec.replications):
			descriptors.append(
				TrialDescriptor(
					cell_index=index,
					replicate=replicate,
					target_y=float(ty),
					target_z=float(tz),
					occ_y=float(oy),
					occ_z=float(oz),
					theta=float(theta),
					w1=float(w1),
					w2=float(w2),
					radius=None if radius is None else float(radius),
					sigma=float(sigma),
					seed=derive_seed(spec.base_seed, index, replicate),
				)
			)

	if not descriptors:
		raise ConfigurationError("the sweep expands to no trials")
	return descriptors
