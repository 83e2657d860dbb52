"""End-to-end tests of the superspin command line."""

import os
from unittest import mock

import numpy as np
import tensorflow as tf
from absl import flags
from absl.testing import parameterized

import superspin
import utils
from lindblad import analysis
from lindblad.errors import NumericalFailureError


def run(*argv):
  return superspin.main(superspin.parse_args(["superspin", *argv]))


class CommandLineTest(tf.test.TestCase, parameterized.TestCase):

  def setUp(self):
    super().setUp()
    self.workdir = self.create_tempdir().full_path

  def path(self, name):
    return os.path.join(self.workdir, name)

  def test_spectrum_both_methods(self):
    out = self.path("spectrum.csv")
    self.assertEqual(run("spectrum", "--model", "btc", "--n", "3", "--omega",
                         "1", "--gamma", "0.1", "--method", "both",
                         "--out", out), 0)
    rows = utils.read_csv(out)
    self.assertEqual(list(rows[0]), list(superspin.SPECTRUM_HEADER))
    methods = [r["method"] for r in rows]
    self.assertEqual(methods.count("exact"), 16)
    self.assertEqual(methods.count("perturbative"), 16)
    for r in rows:
      if r["method"] == "exact":
        self.assertEqual(r["s"], "")
      else:
        self.assertNotEqual(r["s"], "")

  def test_spectrum_without_dissipation(self):
    out = self.path("closed.csv")
    self.assertEqual(run("spectrum", "--model", "btc", "--n", "3", "--gamma",
                         "0", "--method", "exact", "--out", out), 0)
    for r in utils.read_csv(out):
      self.assertLess(abs(float(r["re"])), 1e-12)

  def test_model_a_half_integer_labels(self):
    out = self.path("a.csv")
    self.assertEqual(run("spectrum", "--model", "a", "--n", "3", "--method",
                         "perturbative", "--out", out), 0)
    rows = utils.read_csv(out)
    top = [r for r in rows if r["m"] == "1.5" and r["mp"] == "1.5"]
    self.assertLen(top, 1)
    self.assertEqual(float(top[0]["re"]), 0.0)
    self.assertEqual(float(top[0]["im"]), 0.0)
    self.assertEqual(top[0]["sx"], "")

  def test_output_is_deterministic(self):
    first, second = self.path("one.csv"), self.path("two.csv")
    for out in (first, second):
      run("spectrum", "--model", "b", "--n", "3", "--out", out)
    with open(first, "rb") as f, open(second, "rb") as g:
      self.assertEqual(f.read(), g.read())

  def test_csv_round_trip(self):
    out = self.path("rt.csv")
    run("spectrum", "--model", "btc", "--n", "2", "--method", "exact",
        "--out", out)
    rows = utils.read_csv(out)
    parsed = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    again = [utils.format_float(v.real) for v in parsed]
    self.assertEqual(again, [r["re"] for r in rows])

  def test_json_and_svg(self):
    out, js, svg = (self.path("s.csv"), self.path("s.json"),
                    self.path("s.svg"))
    self.assertEqual(run("spectrum", "--n", "2", "--out", out, "--json", js,
                         "--svg", svg), 0)
    with open(svg, encoding="utf-8") as f:
      self.assertIn("<svg", f.read())
    with open(js, encoding="utf-8") as f:
      self.assertIn('"columns"', f.read())

  def test_density_default_size(self):
    out = self.path("density.csv")
    self.assertEqual(run("density", "--model", "btc", "--gamma", "0.1",
                         "--out", out), 0)
    rows = utils.read_csv(out)
    self.assertLen(rows, 10)
    row = next(r for r in rows if float(r["s_bar"]) == 0.5)
    self.assertAllClose(float(row["g"]), 10.0)

  def test_sweep_writes_events(self):
    out = self.path("sweep.csv")
    self.assertEqual(run("sweep", "--model", "btc", "--n", "1", "--omega", "1",
                         "--gamma-min", "1.5", "--gamma-max", "2.5", "--steps",
                         "101", "--detect-ep", "--out", out), 0)
    self.assertLen(utils.read_csv(out), 101 * 4)
    events = utils.read_csv(self.path("ep_events.csv"))
    self.assertLen(events, 1)
    self.assertAllClose(float(events[0]["gamma_star"]), 2.0, atol=1e-3)

  def test_dynamics_with_closed_form(self):
    out = self.path("dynamics.csv")
    self.assertEqual(run("dynamics", "--model", "b", "--n", "20", "--omega",
                         "1", "--gamma", "2", "--t-max", "5", "--dt", "1e-3",
                         "--init", "polarized-z", "--analytic", "--out", out),
                     0)
    rows = utils.read_csv(out)
    integrated = [float(r["jz"]) for r in rows
                  if r["provenance"] == "integrated"]
    analytic = [float(r["jz"]) for r in rows if r["provenance"] == "analytic"]
    self.assertLen(integrated, 501)
    self.assertLess(np.max(np.abs(np.subtract(integrated, analytic))), 1e-4)

  def test_gap_command(self):
    out = self.path("gap.csv")
    self.assertEqual(run("gap", "--model", "a", "--n-min", "2", "--n-max",
                         "4", "--gamma", "0.05", "--out", out), 0)
    rows = utils.read_csv(out)
    self.assertEqual([r["n"] for r in rows], ["2", "3", "4"])
    for r in rows:
      self.assertAllClose(float(r["closed_form_gap"]), 0.1)

  @parameterized.parameters(
    ("spectrum", "--n", "0"),
    ("spectrum", "--out", "spectrum.txt"),
    ("dynamics", "--model", "btc", "--analytic", "--t-max", "0.1"),
    ("density", "--model", "a"),
    ("dynamics", "--t-max", "-1"),
    ("spectrum", "--n", "1", "--gamma", "-0.5", "--method", "perturbative"),
    ("sweep", "--gamma-min", "-0.5", "--gamma-max", "1"),
    ("dynamics", "--gamma", "-1"),
  )
  def test_invalid_arguments_exit_two(self, *argv):
    self.assertEqual(run(*argv), 2)

  def test_size_flag_is_not_an_abbreviation(self):
    args = superspin.parse_args(
      ["superspin", "spectrum", "--model", "btc", "--n", "3"])
    self.assertEqual(args.n, 3)
    self.assertEqual(args.command, "spectrum")

  def test_flags_are_parsed_for_temp_dirs(self):
    self.assertTrue(flags.FLAGS.is_parsed())
    self.assertTrue(os.path.isdir(self.workdir))

  def test_numerical_failure_exits_three(self):
    failure = NumericalFailureError("QR iteration did not converge", index=7)
    with mock.patch.object(analysis, "exact_spectrum", side_effect=failure):
      self.assertEqual(run("spectrum", "--n", "2", "--method", "exact",
                           "--out", self.path("fail.csv")), 3)

  def test_usage_error_exits_two(self):
    with self.assertRaises(SystemExit) as cm:
      superspin.parse_args(["superspin", "spectrum", "--model", "z"])
    self.assertEqual(cm.exception.code, 2)


if __name__ == "__main__":
  tf.test.main()
