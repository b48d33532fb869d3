"""
SVG figures of servo runs: end-effector path projections, the objective
per step, and an overlay of several runs keyed by one cell parameter.
"""

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Circle

from move_to_see.scene.constants import SQUARE
from move_to_see.scene.scene import SceneModel
from move_to_see.servo.trajectory import TrajectoryLog

# (horizontal, vertical) world axes of each projection panel
PROJECTIONS = (("x", "y"), ("x", "z"))
AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def plot_trajectory(log: TrajectoryLog, path: str | Path, scene: SceneModel | None = None) -> Figure:
	fig = Figure(figsize=(8, 4))
	for panel, (h, v) in enumerate(PROJECTIONS, start=1):
		ax = fig.add_subplot(1, 2, panel)
		_draw_path(ax, log, h, v, label=log.method)
		if scene is not None:
			_draw_scene(ax, scene, h, v)
		ax.set_xlabel(f"{h} [m]")
		ax.set_ylabel(f"{v} [m]")
		ax.set_aspect("equal", adjustable="datalim")
	fig.suptitle(f"{log.method} trajectory ({log.termination}, {len(log.steps)} steps)")
	fig.tight_layout()
	fig.savefig(path, format="svg")
	return fig


def plot_objective(log: TrajectoryLog, path: str | Path) -> Figure:
	fig = Figure(figsize=(6, 4))
	ax = fig.add_subplot(1, 1, 1)
	k = [step.index for step in log.steps]
	ax.plot(k, [step.f_ref for step in log.steps], marker=".", label="f")
	ax.plot(k, [step.p_ref for step in log.steps], linestyle="--", label="p")
	ax.set_xlabel("step")
	ax.set_ylabel("objective")
	ax.legend()
	fig.tight_layout()
	fig.savefig(path, format="svg")
	return fig


def render_overlay(
	logs_by_value: dict[float | str, TrajectoryLog], path: str | Path, group_by: str = "theta"
) -> Figure:
	"""One path per value of `group_by`, seen along the approach (world y-z plane).

	Keys are numbers or the strings report.group_value produces; numeric
	keys are drawn in ascending order.
	"""
	fig = Figure(figsize=(6, 6))
	ax = fig.add_subplot(1, 1, 1)
	for value in sorted(logs_by_value, key=_overlay_key):
		_draw_path(ax, logs_by_value[value], "y", "z", label=_overlay_label(group_by, value))
	ax.set_xlabel("y [m]")
	ax.set_ylabel("z [m]")
	ax.set_aspect("equal", adjustable="datalim")
	ax.legend()
	fig.tight_layout()
	fig.savefig(path, format="svg")
	return fig


def render_plots(log: TrajectoryLog, out_dir: str | Path, scene: SceneModel | None = None) -> list[Path]:
	out_dir = Path(out_dir)
	out_dir.mkdir(parents=True, exist_ok=True)
	paths = [out_dir / f"{log.method}_trajectory.svg", out_dir / f"{log.method}_objective.svg"]
	plot_trajectory(log, paths[0], scene)
	plot_objective(log, paths[1])
	return paths


def _overlay_key(value):
	try:
		return (0, tuple(float(v) for v in str(value).split(",")), "")
	except ValueError:
		return (1, (), str(value))


def _overlay_label(group_by: str, value) -> str:
	if group_by == "theta":
		return f"θ = {float(value):g}°"
	return f"{group_by} = {value}"


def _draw_path(ax, log: TrajectoryLog, h: str, v: str, label: str) -> None:
	points = log.positions[:, [AXIS_INDEX[h], AXIS_INDEX[v]]]
	if len(points) > 1:
		(line,) = ax.plot(points[:, 0], points[:, 1], label=label)
		color = line.get_color()
		ax.plot(*points[-1], marker="x", color=color)
		ax.plot(*points[0], marker="o", color=color)
	else:
		ax.plot(*points[0], marker="o", label=label)


def _draw_scene(ax, scene: SceneModel, h: str, v: str) -> None:
	i, j = AXIS_INDEX[h], AXIS_INDEX[v]
	target = scene.target
	ax.add_patch(Circle((target.center[i], target.center[j]), target.radius, color=target.color, alpha=0.6))

	for occluder in scene.occluders:
		# outline of the patch projected onto the panel
		if occluder.shape == SQUARE:
			corners = np.array([(1, 1), (-1, 1), (-1, -1), (1, -1), (1, 1)], dtype=np.float64)
			s, t = corners[:, 0], corners[:, 1]
		else:
			angles = np.linspace(0.0, 2.0 * np.pi, 65)
			s, t = np.cos(angles), np.sin(angles)
		outline = occluder.center + occluder.half_extent * (
			np.outer(s, occluder.tangent) + np.outer(t, occluder.bitangent)
		)
		ax.fill(outline[:, i], outline[:, j], color=occluder.color, alpha=0.5)
