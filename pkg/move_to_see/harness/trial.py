import logging
import time
from pathlib import Path

from move_to_see.exceptions import ConfigurationError
from move_to_see.harness.config import ExperimentConfig
from move_to_see.harness.report import TrialResult
from move_to_see.harness.sweep import TrialDescriptor, expand_sweep
from move_to_see.render.renderer import add_pixel_noise, camera_seeds, render, write_ppm
from move_to_see.scene.scene import SceneModel, build_scene
from move_to_see.segment.segmentation import validate_scene_colors
from move_to_see.servo.baseline import run_baseline
from move_to_see.servo.constants import METHODS, PROPOSED
from move_to_see.servo.controller import ServoConfig, run_3dmts, step_seed
from move_to_see.servo.trajectory import TrajectoryLog

logger = logging.getLogger(__name__)


def trial_scene(config: ExperimentConfig, descriptor: TrialDescriptor) -> SceneModel:
	scene = build_scene(
		(descriptor.target_y, descriptor.target_z),
		(descriptor.occ_y, descriptor.occ_z),
		descriptor.theta,
		config.scene,
	)
	validate_scene_colors(scene, config.segmentation)
	return scene


def trial_servo_config(config: ExperimentConfig, descriptor: TrialDescriptor) -> ServoConfig:
	return config.servo.replace(
		w1=descriptor.w1, w2=descriptor.w2, sigma=descriptor.sigma, rng_seed=descriptor.seed
	)


def run_trial(
	config: ExperimentConfig, descriptor: TrialDescriptor, method: str
) -> tuple[TrialResult, TrajectoryLog]:
	if method not in METHODS:
		raise ConfigurationError(f"unknown method {method!r}")

	start = time.perf_counter()
	scene = trial_scene(config, descriptor)
	servo = trial_servo_config(config, descriptor)

	if method == PROPOSED:
		array = config.array.build(config.camera, radius=descriptor.radius)
		log = run_3dmts(scene, config.arm, array, config.segmentation, servo)
	else:
		log = run_baseline(scene, config.arm, config.camera, config.segmentation, servo)

	wall_time = time.perf_counter() - start
	logger.info("trial %s (%s): %s after %d steps", descriptor.trial_id, method, log.termination, len(log.steps))
	return TrialResult.from_log(descriptor, method, log, wall_time), log


def first_descriptor(config: ExperimentConfig) -> TrialDescriptor:
	"""The cell `run-trial` uses: the first of the config's sweep grid."""
	return expand_sweep(config.sweep)[0]


def trajectory_path(out_dir: str | Path, trial_id: str, method: str) -> Path:
	return Path(out_dir) / f"trial_{trial_id}_{method}.csv"


def parse_trajectory_path(path: str | Path) -> tuple[str, str]:
	"""(trial_id, method) from a file name written by trajectory_path."""
	name = Path(path).name
	prefix, _, rest = Path(path).stem.partition("_")
	trial_id, _, method = rest.rpartition("_")
	if prefix != "trial" or not trial_id or method not in METHODS:
		raise ConfigurationError(f"{name} is not a trajectory file name (trial_<id>_<method>.csv)")
	return trial_id, method


def find_descriptor(config: ExperimentConfig, trial_id: str) -> TrialDescriptor:
	for descriptor in expand_sweep(config.sweep):
		if descriptor.trial_id == trial_id:
			return descriptor
	raise ConfigurationError(f"trial {trial_id} is not part of the config's sweep grid")


def dump_frames(
	config: ExperimentConfig, descriptor: TrialDescriptor, log: TrajectoryLog, out_dir: str | Path
) -> list[Path]:
	"""Write the reference-camera image of every logged step as a PPM file.

	Frames reuse the per-step noise streams, so they match what the loop saw.
	"""
	out_dir = Path(out_dir)
	out_dir.mkdir(parents=True, exist_ok=True)
	scene = trial_scene(config, descriptor)

	paths = []
	for step in log.steps:
		seed = camera_seeds(step_seed(descriptor.seed, step.index), 1)[0]
		image = add_pixel_noise(render(step.ee_pose, config.camera, scene), descriptor.sigma, seed)
		path = out_dir / f"{descriptor.trial_id}_{log.method}_{step.index:03d}.ppm"
		write_ppm(image, path)
		paths.append(path)
	return paths
