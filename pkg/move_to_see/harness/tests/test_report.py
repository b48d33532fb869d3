import csv
import math
import tempfile
from collections import defaultdict
from pathlib import Path

from move_to_see.exceptions import ConfigurationError
from move_to_see.harness.constants import RELATIVE_DELTA_A, RESULT_FIELDS, RESULTS_FILE, SUMMARY_FIELDS
from move_to_see.harness.report import (
	TrialResult,
	aggregate,
	format_summary,
	group_value,
	read_results,
	write_results,
	write_summary,
)
from move_to_see.servo.constants import NAIVE, PROPOSED
from move_to_see.tests.utils import TestCase


class TestAggregate(TestCase):
	def setUp(self):
		self.results = [TrialResult(**row) for row in self.load_fixture("trial_results")]

	def test_failures_are_counted_not_averaged(self):
		"""requirement: means cover completed trials, IK failures and errors only add to the failure count"""
		with self.assertLogs("move_to_see.harness.report", level="WARNING"):
			rows = aggregate(self.results, "theta")

		self.assertEqual([(r.value, r.method) for r in rows], [("0", NAIVE), ("0", PROPOSED), ("90", PROPOSED)])
		naive, proposed, proposed_90 = rows

		self.assertEqual((naive.count, naive.failures), (1, 1))
		self.assertAlmostEqual(naive.mean_f_n, 0.10)
		self.assertAlmostEqual(naive.mean_delta_a, 8.0)

		self.assertEqual((proposed.count, proposed.failures), (2, 0))
		self.assertAlmostEqual(proposed.mean_f_n, 0.35)
		self.assertAlmostEqual(proposed.std_f_n, 0.05)
		self.assertAlmostEqual(proposed.mean_delta_a, 32.5)

		self.assertEqual(proposed_90.count, 1)
		self.assertEqual(proposed_90.std_f_n, 0.0)

	def test_group_without_completed_trials_is_omitted(self):
		with self.assertLogs("move_to_see.harness.report", level="WARNING") as logs:
			rows = aggregate(self.results, "theta")
		self.assertNotIn(("90", NAIVE), [(r.value, r.method) for r in rows])
		self.assertIn("no completed trials", logs.output[0])

	def test_single_result(self):
		rows = aggregate(self.results[:1], "theta")
		self.assertEqual(len(rows), 1)
		self.assertEqual(rows[0].mean_f_n, 0.40)
		self.assertEqual(rows[0].std_delta_a, 0.0)

	def test_relative_area_change(self):
		rows = aggregate(self.results[:1], "theta", relative=True)
		self.assertAlmostEqual(rows[0].mean_delta_a, 1900.0)
		self.assertEqual(rows[0].delta_a_kind, RELATIVE_DELTA_A)

	def test_group_by_weights(self):
		rows = aggregate(self.results, "weights")
		self.assertEqual({r.value for r in rows}, {"1,0"})
		by_method = {r.method: r for r in rows}
		self.assertEqual((by_method[NAIVE].count, by_method[NAIVE].failures), (1, 2))
		self.assertEqual((by_method[PROPOSED].count, by_method[PROPOSED].failures), (3, 0))

	def test_unknown_group_rejected(self):
		self.assertRaises(ConfigurationError, aggregate, self.results, "colour")
		self.assertRaises(ConfigurationError, aggregate, [], "theta")

	def test_group_value_formats_default_radius(self):
		result = TrialResult(**{**self.load_fixture("trial_results")[0], "radius": None})
		self.assertEqual(group_value(result, "r"), "default")
		self.assertEqual(group_value(result, "theta"), "0")

	def test_matches_one_pass_over_results_csv(self):
		"""requirement: summary means equal a direct pass over the written results file"""
		with tempfile.TemporaryDirectory() as tmp:
			write_results(self.results, Path(tmp) / RESULTS_FILE)
			reloaded = read_results(tmp)
			with open(Path(tmp) / RESULTS_FILE, newline="") as f:
				raw = list(csv.DictReader(f))

		sums = defaultdict(lambda: [0, 0.0, 0.0, 0.0])
		for row in raw:
			if row["status"] != "Success" or row["termination"] in ("ik_failed", "error"):
				continue
			acc = sums[(f"{float(row['theta']):g}", row["method"])]
			acc[0] += 1
			acc[1] += float(row["f_n"])
			acc[2] += float(row["f_n"]) ** 2
			acc[3] += float(row["delta_a"])

		rows = aggregate(reloaded, "theta")
		self.assertEqual(len(rows), len(sums))
		for row in rows:
			n, total, squares, delta = sums[(row.value, row.method)]
			self.assertEqual(row.count, n)
			self.assertLess(abs(row.mean_f_n - total / n), 1e-12)
			self.assertLess(abs(row.std_f_n - math.sqrt(max(squares / n - (total / n) ** 2, 0.0))), 1e-9)
			self.assertLess(abs(row.mean_delta_a - delta / n), 1e-12)


class TestResultsCsv(TestCase):
	def test_round_trip(self):
		results = [TrialResult(**row) for row in self.load_fixture("trial_results")]
		with tempfile.TemporaryDirectory() as tmp:
			path = Path(tmp) / RESULTS_FILE
			write_results(list(reversed(results)), path)
			with open(path, newline="") as f:
				header = next(csv.reader(f))
			reloaded = read_results(path)

		self.assertEqual(header, RESULT_FIELDS)
		self.assertEqual([(r.trial_id, r.method) for r in reloaded], sorted((r.trial_id, r.method) for r in results))
		failed = [r for r in reloaded if r.status == "Error"]
		self.assertEqual(len(failed), 1)
		self.assertTrue(math.isnan(failed[0].f_n))
		self.assertEqual(failed[0].message, "renderer crashed")
		self.assertIsInstance(reloaded[0].steps, int)

	def test_missing_file(self):
		self.assertRaises(ConfigurationError, read_results, "/nonexistent/results.csv")

	def test_summary_file_and_table(self):
		rows = aggregate([TrialResult(**row) for row in self.load_fixture("trial_results")[:2]], "theta")
		with tempfile.TemporaryDirectory() as tmp:
			path = Path(tmp) / "summary.csv"
			write_summary(rows, path)
			with open(path, newline="") as f:
				written = list(csv.DictReader(f))

		self.assertEqual(list(written[0]), SUMMARY_FIELDS)
		self.assertEqual(len(written), 2)
		table = format_summary(rows)
		self.assertIn("proposed", table)
		self.assertTrue(table.endswith("dA in absolute percentage points"))
