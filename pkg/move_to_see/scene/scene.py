"""
The simulated world: one spherical target, planar occluders and a flat
background, placed the way the occlusion experiments place them.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from move_to_see.controllers.setting import SettingController
from move_to_see.exceptions import ConfigurationError
from move_to_see.scene.constants import (
	BACKGROUND,
	BACKGROUND_CODE,
	BACKGROUND_COLOR,
	DISK,
	OCCLUDER,
	OCCLUDER_CODE,
	OCCLUDER_COLOR,
	OCCLUDER_SHAPES,
	RAY_EPSILON,
	SQUARE,
	TARGET,
	TARGET_CODE,
	TARGET_COLOR,
)
from move_to_see.scene.geometry import Vec3, as_vec3, is_unit, unit

Color = tuple[float, float, float]


def _check_color(color, name: str) -> None:
	if len(color) != 3 or not all(0.0 <= c <= 1.0 for c in color):
		raise ConfigurationError(f"{name} must be an RGB triple in [0, 1]")


@dataclass(frozen=True)
class SceneSettings(SettingController):
	"""Base parameters from which build_scene places target and occluder.

	`anchor` is the nominal target position and `start_camera` the nominal
	start camera position; the harness derives both from the arm's start
	pose and `start_standoff` when a config leaves them out.
	"""

	anchor: tuple[float, float, float] | None = None
	start_camera: tuple[float, float, float] | None = None
	start_standoff: float = 0.35
	target_radius: float = 0.05
	target_color: Color = TARGET_COLOR
	occluder_standoff: float = 0.05
	occluder_half_extent: float = 0.03
	occluder_shape: str = DISK
	occluder_color: Color = OCCLUDER_COLOR
	include_occluder: bool = True
	background_color: Color = BACKGROUND_COLOR
	workspace_size: float = 1.0

	def validate(self):
		if self.target_radius <= 0:
			raise ConfigurationError("target_radius must be positive")
		if self.occluder_half_extent <= 0:
			raise ConfigurationError("occluder_half_extent must be positive")
		if self.occluder_standoff <= 0 or self.start_standoff <= 0:
			raise ConfigurationError("standoff distances must be positive")
		if self.occluder_shape not in OCCLUDER_SHAPES:
			raise ConfigurationError(f"occluder_shape must be one of {', '.join(OCCLUDER_SHAPES)}")
		if self.workspace_size <= 0:
			raise ConfigurationError("workspace_size must be positive")
		_check_color(self.target_color, "target_color")
		_check_color(self.occluder_color, "occluder_color")
		_check_color(self.background_color, "background_color")


@dataclass(frozen=True)
class Workspace:
	lower: tuple[float, float, float]
	upper: tuple[float, float, float]

	@classmethod
	def cube(cls, center: ArrayLike, size: float) -> "Workspace":
		center = as_vec3(center, "workspace center")
		half = size / 2.0
		return cls(tuple((center - half).tolist()), tuple((center + half).tolist()))

	def contains(self, point: ArrayLike) -> bool:
		point = np.asarray(point)
		return bool(np.all(point >= self.lower) and np.all(point <= self.upper))


@dataclass(frozen=True, eq=False)
class TargetObject:
	center: Vec3
	radius: float
	color: Color = TARGET_COLOR

	def __post_init__(self):
		object.__setattr__(self, "center", as_vec3(self.center, "target center"))
		if self.radius <= 0:
			raise ConfigurationError("target radius must be positive")


@dataclass(frozen=True, eq=False)
class Occluder:
	center: Vec3
	normal: Vec3
	half_extent: float
	shape: str = DISK
	color: Color = OCCLUDER_COLOR
	occlusion_angle: float = 0.0
	# in-plane edge direction, only meaningful for squares
	tangent: Vec3 | None = None

	def __post_init__(self):
		object.__setattr__(self, "center", as_vec3(self.center, "occluder center"))
		if not is_unit(self.normal):
			raise ConfigurationError("occluder normal must be a unit vector")
		object.__setattr__(self, "normal", as_vec3(self.normal, "occluder normal"))
		if self.half_extent <= 0:
			raise ConfigurationError("occluder half-extent must be positive")
		if self.shape not in OCCLUDER_SHAPES:
			raise ConfigurationError(f"unknown occluder shape {self.shape!r}")

		tangent = self.tangent
		if tangent is None:
			tangent = _perpendicular(self.normal)
		tangent = np.asarray(tangent, dtype=np.float64)
		tangent = unit(tangent - tangent.dot(self.normal) * self.normal, "occluder tangent")
		object.__setattr__(self, "tangent", tangent)

	@property
	def bitangent(self) -> Vec3:
		return np.cross(self.normal, self.tangent)

	def in_plane(self, local: NDArray) -> NDArray[np.bool_]:
		"""Whether points given relative to the center (on the plane) lie on the patch."""
		if self.shape == SQUARE:
			s = np.abs(local @ self.tangent)
			t = np.abs(local @ self.bitangent)
			return (s <= self.half_extent) & (t <= self.half_extent)
		return np.einsum("...i,...i->...", local, local) <= self.half_extent**2


@dataclass(frozen=True, eq=False)
class SceneModel:
	target: TargetObject
	occluders: tuple[Occluder, ...] = ()
	background_color: Color = BACKGROUND_COLOR
	workspace: Workspace = field(default_factory=lambda: Workspace((-10.0,) * 3, (10.0,) * 3))

	def __post_init__(self):
		object.__setattr__(self, "occluders", tuple(self.occluders))
		if not self.workspace.contains(self.target.center):
			raise ConfigurationError("target center lies outside the workspace")

	def color_table(self) -> NDArray[np.float64]:
		"""Colors indexed by kind code + 1 (background first)."""
		colors = [self.background_color, self.target.color]
		colors.extend(o.color for o in self.occluders)
		return np.asarray(colors, dtype=np.float64)


@dataclass(frozen=True)
class HitRecord:
	kind: str
	distance: float
	color: Color


def build_scene(
	target_offset_yz: tuple[float, float],
	occluder_offset_yz: tuple[float, float],
	occlusion_angle: float,
	base_config: SceneSettings,
) -> SceneModel:
	"""Place the target and one occluder for an experiment cell.

	The target is displaced from the anchor by world y/z offsets. The
	occluder sits `occluder_standoff` in front of the target toward the start
	camera, is displaced by its own offsets in the plane normal to that
	viewing axis (reference direction: world +y projected off the axis), and
	the placement is then rotated by `occlusion_angle` degrees about the axis.
	"""
	if abs(occlusion_angle) > 180:
		raise ConfigurationError("occlusion angle must lie within [-180, 180] degrees")
	if base_config.anchor is None or base_config.start_camera is None:
		raise ConfigurationError("scene settings need both an anchor and a start camera position")

	anchor = as_vec3(base_config.anchor, "anchor")
	workspace = Workspace.cube(anchor, base_config.workspace_size)

	ty, tz = target_offset_yz
	target_center = anchor + np.array([0.0, ty, tz])
	if not workspace.contains(target_center):
		raise ConfigurationError(f"target offset ({ty}, {tz}) leaves the workspace")
	target = TargetObject(target_center, base_config.target_radius, tuple(base_config.target_color))

	occluders = ()
	if base_config.include_occluder:
		occluders = (_place_occluder(target_center, occluder_offset_yz, occlusion_angle, base_config, workspace),)

	return SceneModel(
		target=target,
		occluders=occluders,
		background_color=tuple(base_config.background_color),
		workspace=workspace,
	)


def viewing_frame(target_center: ArrayLike, start_camera: ArrayLike) -> tuple[Vec3, Vec3, Vec3]:
	"""Return (axis, reference, second) for the target-to-start-camera axis.

	`reference` is world +y projected off the axis, `second` completes the
	frame so that it lines up with world +z when the axis looks along +x.
	"""
	axis = unit(np.asarray(start_camera) - np.asarray(target_center), "viewing axis")
	reference = np.array([0.0, 1.0, 0.0])
	if abs(reference.dot(axis)) > 1.0 - 1e-6:
		reference = np.array([0.0, 0.0, 1.0])
	reference = unit(reference - reference.dot(axis) * axis)
	second = np.cross(reference, axis)
	return axis, reference, second


def _place_occluder(
	target_center: Vec3,
	offset_yz: tuple[float, float],
	angle: float,
	settings: SceneSettings,
	workspace: Workspace,
) -> Occluder:
	axis, reference, second = viewing_frame(target_center, settings.start_camera)
	oy, oz = offset_yz

	local = settings.occluder_standoff * axis + oy * reference + oz * second
	rotation = Rotation.from_rotvec(math.radians(angle) * axis)
	center = target_center + rotation.apply(local)
	if not workspace.contains(center):
		raise ConfigurationError(f"occluder offset ({oy}, {oz}) leaves the workspace")

	return Occluder(
		center=center,
		normal=axis,
		half_extent=settings.occluder_half_extent,
		shape=settings.occluder_shape,
		color=tuple(settings.occluder_color),
		occlusion_angle=float(angle),
		tangent=rotation.apply(reference),
	)


def cast_rays(
	origin: ArrayLike, directions: NDArray[np.float64], scene: SceneModel
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
	"""Nearest hit for a bundle of unit rays sharing one origin.

	Returns kind codes (BACKGROUND_CODE, TARGET_CODE, OCCLUDER_CODE + i) and
	hit distances (+inf for background).
	"""
	origin = np.asarray(origin, dtype=np.float64)
	directions = np.atleast_2d(directions)

	best = _sphere_distances(origin, directions, scene.target)
	codes = np.where(np.isfinite(best), TARGET_CODE, BACKGROUND_CODE)

	for index, occluder in enumerate(scene.occluders):
		dist = _patch_distances(origin, directions, occluder)
		closer = dist < best
		best = np.where(closer, dist, best)
		codes = np.where(closer, OCCLUDER_CODE + index, codes)

	return codes.astype(np.int64), best


def ray_hit(origin: ArrayLike, direction: ArrayLike, scene: SceneModel) -> HitRecord:
	direction = np.asarray(direction, dtype=np.float64)
	if not is_unit(direction):
		raise ConfigurationError("ray direction must be a unit vector")

	codes, distances = cast_rays(origin, direction[None, :], scene)
	code, distance = int(codes[0]), float(distances[0])

	if code == BACKGROUND_CODE:
		return HitRecord(BACKGROUND, math.inf, tuple(scene.background_color))
	if code == TARGET_CODE:
		return HitRecord(TARGET, distance, tuple(scene.target.color))
	return HitRecord(OCCLUDER, distance, tuple(scene.occluders[code - OCCLUDER_CODE].color))


def clearance(point: ArrayLike, scene: SceneModel) -> float:
	"""Smallest distance from a point to any surface in the scene."""
	point = as_vec3(point, "point")
	nearest = float(np.linalg.norm(point - scene.target.center) - scene.target.radius)

	for occluder in scene.occluders:
		local = point - occluder.center
		height = float(local @ occluder.normal)
		if occluder.shape == SQUARE:
			ds = max(abs(float(local @ occluder.tangent)) - occluder.half_extent, 0.0)
			dt = max(abs(float(local @ occluder.bitangent)) - occluder.half_extent, 0.0)
			dist = math.sqrt(height**2 + ds**2 + dt**2)
		else:
			radial = float(np.linalg.norm(local - height * occluder.normal))
			dist = math.hypot(height, max(radial - occluder.half_extent, 0.0))
		nearest = min(nearest, dist)

	return nearest


def _sphere_distances(origin: Vec3, directions: NDArray, target: TargetObject) -> NDArray[np.float64]:
	oc = origin - target.center
	b = directions @ oc
	c = oc @ oc - target.radius**2
	disc = b * b - c

	with np.errstate(invalid="ignore"):
		root = np.sqrt(np.where(disc >= 0, disc, np.nan))
	near = -b - root
	far = -b + root

	dist = np.where(near > RAY_EPSILON, near, np.where(far > RAY_EPSILON, far, np.inf))
	return np.where(np.isnan(dist), np.inf, dist)


def _patch_distances(origin: Vec3, directions: NDArray, occluder: Occluder) -> NDArray[np.float64]:
	denom = directions @ occluder.normal
	parallel = np.abs(denom) < 1e-12
	with np.errstate(divide="ignore", invalid="ignore"):
		t = ((occluder.center - origin) @ occluder.normal) / np.where(parallel, 1.0, denom)

	hits = origin + t[:, None] * directions
	inside = occluder.in_plane(hits - occluder.center)
	valid = ~parallel & (t > RAY_EPSILON) & inside
	return np.where(valid, t, np.inf)


def _perpendicular(normal: Vec3) -> Vec3:
	helper = np.array([0.0, 1.0, 0.0]) if abs(normal[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
	return unit(np.cross(normal, helper))
