import math
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from move_to_see.exceptions import ConfigurationError
from move_to_see.render.camera import CameraArray, CameraIntrinsics, array_for_radius, default_array_layout
from move_to_see.render.renderer import add_pixel_noise, array_views, render, to_uint8, write_ppm
from move_to_see.tests.utils import TestCase


def target_pixels(image, scene):
	return np.all(np.isclose(image, scene.target.color), axis=-1)


class TestCameraIntrinsics(TestCase):
	def test_focal_length_from_fov(self):
		self.assertAlmostEqual(self.intrinsics.focal_length, 32.0 / math.tan(math.radians(30.0)))
		self.assertAlmostEqual(self.intrinsics.vertical_fov, self.intrinsics.horizontal_fov)

	def test_center_pixel_looks_along_axis(self):
		cx, cy = self.intrinsics.center
		np.testing.assert_allclose(self.intrinsics.pixel_ray(cx, cy), [0.0, 0.0, 1.0])

	def test_pixel_rays_are_row_major_units(self):
		rays = self.intrinsics.pixel_rays()
		self.assertEqual(rays.shape, (64 * 64, 3))
		np.testing.assert_allclose(np.linalg.norm(rays, axis=1), 1.0)
		np.testing.assert_allclose(rays[5 * 64 + 7], self.intrinsics.pixel_ray(7, 5))
		# image right is +x, image down is +y
		self.assertGreater(rays[63][0], 0.0)
		self.assertGreater(rays[63 * 64][1], 0.0)

	def test_rejects_tiny_image(self):
		self.assertRaises(ConfigurationError, CameraIntrinsics, image_width=8)


class TestCameraArray(TestCase):
	def test_default_layout(self):
		array = default_array_layout(0.027, 0.027, 0.03)
		self.assertEqual(array.n, 8)
		self.assertTrue(np.all(array.offsets[:, 2] == 0.03))
		self.assertAlmostEqual(array.radius, math.sqrt(2 * 0.027**2 + 0.03**2))

	def test_array_for_radius(self):
		"""requirement: the scaled layout puts its corner cameras at the requested radius"""
		for radius in (0.06, 0.09, 0.12):
			self.assertAlmostEqual(array_for_radius(radius).radius, radius, places=12)

	def test_rank_deficient_offsets_rejected(self):
		"""requirement: coplanar offsets leave the gradient unobservable and are refused"""
		planar = [(0.03, 0.0, 0.0), (0.0, 0.03, 0.0), (-0.03, 0.0, 0.0), (0.0, -0.03, 0.0)]
		self.assertRaises(ConfigurationError, CameraArray, planar)

	def test_too_few_cameras(self):
		self.assertRaises(ConfigurationError, CameraArray, [(0.03, 0.0, 0.0), (0.0, 0.03, 0.0)])

	def test_zero_offset_rejected(self):
		offsets = [(0.0, 0.0, 0.0), (0.03, 0.0, 0.0), (0.0, 0.03, 0.0), (0.0, 0.0, 0.03)]
		self.assertRaises(ConfigurationError, CameraArray, offsets)

	def test_camera_poses_follow_end_effector(self):
		array = CameraArray([(0.03, 0.0, 0.0), (0.0, 0.03, 0.0), (0.0, 0.0, 0.03)])
		poses = array.camera_poses(self.start_pose)
		self.assertEqual(len(poses), 4)
		self.assertIs(poses[0], self.start_pose)
		# camera x is world -y, camera z is world +x for the start pose
		np.testing.assert_allclose(poses[1].position, [0.65, -0.03, 0.5], atol=1e-12)
		np.testing.assert_allclose(poses[3].position, [0.68, 0.0, 0.5], atol=1e-12)
		np.testing.assert_allclose(poses[2].quaternion, self.start_pose.quaternion)


class TestRender(TestCase):
	def test_target_ahead_fills_center(self):
		scene = self.unoccluded_scene()
		image = render(self.start_pose, self.intrinsics, scene)
		self.assertEqual(image.shape, (64, 64, 3))
		np.testing.assert_allclose(image[32, 32], scene.target.color)
		np.testing.assert_allclose(image[0, 0], scene.background_color)

	def test_occluder_covers_target(self):
		scene = self.make_scene()
		image = render(self.start_pose, self.intrinsics, scene)
		np.testing.assert_allclose(image[32, 32], scene.occluders[0].color)

	def test_default_leaf_leaves_a_ring_of_target(self):
		"""requirement: the default occluder on the viewing axis hides the middle of the target, not its rim"""
		scene = self.make_arm_scene()
		image = render(self.arm_start_pose, self.intrinsics, scene)
		np.testing.assert_allclose(image[32, 32], scene.occluders[0].color)

		clear = render(self.arm_start_pose, self.intrinsics, self.make_arm_scene(include_occluder=False))
		visible = int(target_pixels(image, scene).sum())
		full = int(target_pixels(clear, scene).sum())
		self.assertGreater(visible, 0.3 * full)
		self.assertLess(visible, 0.8 * full)

	def test_projected_area_matches_sphere_silhouette(self):
		"""requirement: a centred sphere covers the image fraction of its analytic silhouette to within 2%"""
		scene = self.make_scene(include_occluder=False, anchor=(0.95, 0.0, 0.5))
		fraction = float(target_pixels(render(self.start_pose, self.intrinsics, scene), scene).mean())

		radius, distance = 0.05, 0.3
		radius_px = self.intrinsics.focal_length * radius / math.sqrt(distance**2 - radius**2)
		expected = math.pi * radius_px**2 / (64 * 64)
		self.assertAlmostEqual(expected, 0.0673, places=4)
		self.assertLess(abs(fraction - expected), 0.02 * expected)

	def test_target_fraction_shrinks_with_distance(self):
		"""requirement: moving the target away along the optical axis never increases its image fraction"""
		fractions = []
		for k in range(10):
			scene = self.make_scene(include_occluder=False, anchor=(0.95 + 0.05 * k, 0.0, 0.5))
			fractions.append(float(target_pixels(render(self.start_pose, self.intrinsics, scene), scene).mean()))

		self.assertTrue(all(far <= near for near, far in zip(fractions, fractions[1:])))
		self.assertGreater(fractions[-1], 0.0)
		self.assertLess(fractions[-1], fractions[0])

	def test_target_offset_moves_in_image(self):
		"""requirement: a target moved to world +y shows up in the left half of the image"""
		scene = self.make_scene(target_offset=(0.1, 0.0), include_occluder=False)
		image = render(self.start_pose, self.intrinsics, scene)
		is_target = np.all(np.isclose(image, scene.target.color), axis=-1)
		cols = np.nonzero(is_target)[1]
		self.assertTrue(cols.size > 0)
		self.assertLess(cols.mean(), 31.5)

	def test_array_views_reference_first(self):
		array = default_array_layout(0.027, 0.027, 0.03)
		views = array_views(self.start_pose, array, self.unoccluded_scene(), sigma=0.0, rng_seed=1)
		self.assertEqual(len(views.images), 9)
		self.assertEqual(len(views.poses), 9)
		np.testing.assert_array_equal(views.reference, render(self.start_pose, self.intrinsics, self.unoccluded_scene()))

	def test_every_view_renders_the_composed_camera_pose(self):
		"""requirement: each offset view is the render from the end-effector pose moved by that camera's offset"""
		array = default_array_layout(0.027, 0.027, 0.03)
		scene = self.make_scene(occluder_offset=(0.1, 0.0))
		views = array_views(self.start_pose, array, scene, sigma=0.0, rng_seed=1)

		for offset, pose, image in zip(array.offsets, views.poses[1:], views.images[1:], strict=True):
			expected = self.start_pose.translated(self.start_pose.matrix @ offset)
			np.testing.assert_allclose(pose.position, expected.position, atol=1e-12)
			np.testing.assert_allclose(pose.matrix, self.start_pose.matrix, atol=1e-12)
			np.testing.assert_array_equal(image, render(expected, self.intrinsics, scene))


class TestPixelNoise(TestCase):
	def setUp(self):
		self.image = render(self.start_pose, self.intrinsics, self.unoccluded_scene())

	def test_negative_sigma_rejected(self):
		self.assertRaises(ConfigurationError, add_pixel_noise, self.image, -0.1, 0)

	def test_zero_sigma_is_identity(self):
		noisy = add_pixel_noise(self.image, 0.0, 0)
		np.testing.assert_array_equal(noisy, self.image)
		self.assertIsNot(noisy, self.image)

	def test_seeded_and_clamped(self):
		"""requirement: the same seed gives the same noise and values stay within [0, 1]"""
		first = add_pixel_noise(self.image, 0.3, 42)
		np.testing.assert_array_equal(first, add_pixel_noise(self.image, 0.3, 42))
		self.assertFalse(np.array_equal(first, add_pixel_noise(self.image, 0.3, 43)))
		self.assertGreaterEqual(first.min(), 0.0)
		self.assertLessEqual(first.max(), 1.0)

	def test_noise_is_zero_mean(self):
		"""requirement: the noise sample mean lies within three standard errors of zero"""
		grey = np.full((64, 64, 3), 0.5)
		sigma = 0.05
		noise = add_pixel_noise(grey, sigma, 2019) - grey
		self.assertLess(abs(float(noise.mean())), 3 * sigma / math.sqrt(noise.size))
		self.assertAlmostEqual(float(noise.std()), sigma, delta=0.05 * sigma)

	def test_views_use_independent_streams(self):
		array = default_array_layout(0.027, 0.027, 0.03)
		views = array_views(self.start_pose, array, self.unoccluded_scene(), sigma=0.05, rng_seed=7)
		noise_a = views.images[1] - render(views.poses[1], self.intrinsics, self.unoccluded_scene())
		noise_b = views.images[2] - render(views.poses[2], self.intrinsics, self.unoccluded_scene())
		self.assertFalse(np.allclose(noise_a, noise_b))


class TestWritePpm(TestCase):
	def test_binary_ppm(self):
		image = render(self.start_pose, self.intrinsics, self.unoccluded_scene())
		with tempfile.TemporaryDirectory() as tmp:
			path = Path(tmp) / "frame.ppm"
			write_ppm(image, path)
			self.assertTrue(path.read_bytes().startswith(b"P6"))
			with PILImage.open(path) as loaded:
				self.assertEqual(loaded.size, (64, 64))
				np.testing.assert_array_equal(np.asarray(loaded), to_uint8(image))
