import json
import tempfile
from pathlib import Path

import numpy as np

from move_to_see.exceptions import ConfigurationError
from move_to_see.harness.config import ArraySettings, load_experiment
from move_to_see.harness.constants import PACKAGE_CONFIG_DIR
from move_to_see.harness.sweep import SweepSpec, derive_seed, expand_sweep
from move_to_see.tests.utils import TestCase


class TestExpandSweep(TestCase):
	def test_position_grid(self):
		"""requirement: three values for each of five placement parameters give 243 cells"""
		values = (-0.1, 0.0, 0.1)
		spec = SweepSpec(
			target_y=values, target_z=values, occ_y=values, occ_z=values, theta=(-45.0, 0.0, 45.0)
		)
		descriptors = expand_sweep(spec)
		self.assertEqual(len(descriptors), 243)
		self.assertEqual(spec.cell_count, 243)
		self.assertEqual(len({d.trial_id for d in descriptors}), 243)

	def test_single_cell(self):
		descriptors = expand_sweep(SweepSpec())
		self.assertEqual(len(descriptors), 1)
		self.assertEqual(descriptors[0].trial_id, "0000-0")
		self.assertIsNone(descriptors[0].radius)

	def test_replicates_double_the_trials_with_distinct_seeds(self):
		spec = SweepSpec(theta=(0.0, 90.0), replications=2)
		descriptors = expand_sweep(spec)
		self.assertEqual(len(descriptors), 4)
		self.assertEqual(spec.trial_count, 4)
		self.assertEqual(len({d.seed for d in descriptors}), 4)
		self.assertEqual([d.trial_id for d in descriptors], ["0000-0", "0000-1", "0001-0", "0001-1"])

	def test_grid_order_varies_last_parameter_fastest(self):
		descriptors = expand_sweep(SweepSpec(theta=(0.0, 90.0), sigma=(0.001, 0.01)))
		expected = [(0.0, 0.001), (0.0, 0.01), (90.0, 0.001), (90.0, 0.01)]
		self.assertEqual([(d.theta, d.sigma) for d in descriptors], expected)

	def test_derive_seed_is_stable(self):
		self.assertEqual(derive_seed(2019, 5, 1), derive_seed(2019, 5, 1))
		self.assertNotEqual(derive_seed(2019, 5, 0), derive_seed(2019, 5, 1))
		self.assertNotEqual(derive_seed(2019, 5, 0), derive_seed(2020, 5, 0))

	def test_empty_list_rejected(self):
		self.assertRaises(ConfigurationError, SweepSpec, theta=())
		self.assertRaises(ConfigurationError, SweepSpec, weights=((1.0,),))
		self.assertRaises(ConfigurationError, SweepSpec, methods=("random",))

	def test_shipped_grid(self):
		config = load_experiment(PACKAGE_CONFIG_DIR / "occlusion_grid.json")
		self.assertEqual(config.sweep.cell_count, 243 * 2 * 3 * 2)
		weights = {(d.w1, d.w2) for d in expand_sweep(config.sweep)}
		self.assertEqual(weights, {(1.0, 0.0), (0.8, 0.2)})


class TestLoadExperiment(TestCase):
	def test_shipped_trial_config(self):
		config = load_experiment(PACKAGE_CONFIG_DIR / "trial.json")
		np.testing.assert_allclose(config.scene.anchor, [0.976, 0.0, 0.34], atol=1e-3)
		np.testing.assert_allclose(config.scene.start_camera, [0.626, 0.0, 0.34], atol=1e-3)
		self.assertEqual(config.sweep.trial_count, 1)
		self.assertEqual(config.servo.alpha, 0.01)
		self.assertAlmostEqual(config.array.build(config.camera).radius, 0.06, places=12)

	def test_angle_config_uses_explicit_offsets(self):
		config = load_experiment(PACKAGE_CONFIG_DIR / "angle_sweep.json")
		array = config.array.build(config.camera)
		self.assertEqual(array.n, 8)
		self.assertEqual(len(config.sweep.theta), 8)
		# a sweep radius still overrides the explicit layout
		self.assertAlmostEqual(config.array.build(config.camera, radius=0.09).radius, 0.09, places=12)

	def test_inline_config_defaults(self):
		config = load_experiment({})
		self.assertIsNone(config.source)
		self.assertEqual(config.camera.image_width, 64)
		self.assertEqual(config.sweep.trial_count, 1)

	def test_fixture_config(self):
		config = load_experiment(self.load_fixture("small_experiment"))
		self.assertEqual(config.camera.image_width, 32)
		self.assertEqual(config.servo.max_steps, 4)

	def test_unknown_section_rejected(self):
		self.assertRaises(ConfigurationError, load_experiment, {"robot": {}})

	def test_unknown_key_rejected(self):
		self.assertRaises(ConfigurationError, load_experiment, {"servo": {"gain": 2.0}})

	def test_missing_file(self):
		self.assertRaises(ConfigurationError, load_experiment, "/nonexistent/experiment.json")

	def test_arm_path_relative_to_config(self):
		with tempfile.TemporaryDirectory() as tmp:
			arm = self.arm.as_dict()
			arm["start_q"] = [0.0, 0.5, 0.0, -1.5, 0.0, -0.5, 0.0]
			(Path(tmp) / "arm.json").write_text(json.dumps(arm))
			(Path(tmp) / "experiment.json").write_text(json.dumps({"arm": "arm.json"}))
			config = load_experiment(Path(tmp) / "experiment.json")
		np.testing.assert_array_equal(config.arm.start_q, arm["start_q"])


class TestArraySettings(TestCase):
	def test_radius_and_offsets_are_exclusive(self):
		offsets = ((0.03, 0.0, 0.0), (0.0, 0.03, 0.0), (0.0, 0.0, 0.03))
		self.assertRaises(ConfigurationError, ArraySettings, radius=0.06, offsets=offsets)

	def test_default_layout(self):
		array = ArraySettings().build(self.intrinsics)
		self.assertEqual(array.n, 8)
