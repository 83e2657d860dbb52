"""Tests of the first-order superspin perturbation theory."""

import collections

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from lindblad.analysis import exact_spectrum, match_spectra
from lindblad.collective_spin import build_spin_ops
from lindblad.errors import InvalidArgumentError
from lindblad.models import ModelId, ModelSpec, assemble
from lindblad.perturbation import (closed_form_spectrum,
                                   effective_form_deviation, effective_ld,
                                   effective_ld_btc,
                                   first_order_spectrum_generic, values_of)
from lindblad.superop import Liouvillian, build_l0, build_ld, build_superspin


def _mismatch(model, n, gamma, omega=1.0):
  exact = exact_spectrum(ModelSpec.for_model(model, n, omega, gamma))
  closed = values_of(closed_form_spectrum(model, n, omega, gamma))
  return match_spectra(exact, closed).max_distance


class ClosedFormTest(tf.test.TestCase, parameterized.TestCase):

  @parameterized.product(model=list(ModelId), n=[1, 2, 5])
  def test_cardinality(self, model, n):
    self.assertLen(closed_form_spectrum(model, n, 1.0, 0.1), (n + 1) ** 2)

  def test_btc_labels(self):
    spectrum = closed_form_spectrum("btc", 3, 1.0, 0.1)
    by_label = {(e.s, e.s_x): e.value for e in spectrum}
    self.assertAllClose(by_label[(0, 0)], 0.0)
    self.assertAllClose(by_label[(1, 0)], -0.2 / 3)
    self.assertAllClose(by_label[(2, -1)], -2j - 0.7 / 3)

  def test_model_a_steady_state(self):
    spectrum = closed_form_spectrum("a", 3, 1.0, 0.1)
    top = [e for e in spectrum if e.m == 1.5 and e.m_prime == 1.5]
    self.assertLen(top, 1)
    self.assertAllClose(top[0].value, 0.0)

  def test_model_c_degeneracy(self):
    n = 4
    counts = collections.Counter(
      e.s_x for e in closed_form_spectrum("c", n, 1.0, 0.1))
    self.assertEqual(dict(counts),
                     {s_x: n + 1 - abs(s_x) for s_x in range(-n, n + 1)})

  def test_model_c_degeneracy_matches_exact(self):
    n, omega = 6, 1.0
    values = exact_spectrum(ModelSpec.for_model("c", n, omega, 0.1))
    sectors = collections.Counter(np.rint(values.imag / (2 * omega)).astype(int))
    self.assertEqual(dict(sectors),
                     {s_x: n + 1 - abs(s_x) for s_x in range(-n, n + 1)})


class GenericPerturbationTest(tf.test.TestCase, parameterized.TestCase):

  @parameterized.product(model=list(ModelId), n=[1, 2, 3, 4, 5])
  def test_generic_matches_closed_form(self, model, n):
    spec = ModelSpec.for_model(model, n, 1.0, 0.1)
    generic = first_order_spectrum_generic(assemble(spec), 1.0)
    closed = closed_form_spectrum(model, n, 1.0, 0.1)
    match = match_spectra(values_of(generic), values_of(closed))
    self.assertLess(match.max_distance, 1e-9)

  @parameterized.parameters(ModelId.BTC, ModelId.B)
  def test_generic_labels(self, model):
    n = 3
    spec = ModelSpec.for_model(model, n, 1.0, 0.1)
    generic = first_order_spectrum_generic(assemble(spec), 1.0)
    closed = {(e.s, e.s_x): e.value
              for e in closed_form_spectrum(model, n, 1.0, 0.1)}
    self.assertLen(generic, len(closed))
    for e in generic:
      self.assertAllClose(e.value, closed[(e.s, e.s_x)], atol=1e-9)

  def test_model_a_product_labels(self):
    n = 3
    spec = ModelSpec.for_model("a", n, 1.0, 0.1)
    generic = first_order_spectrum_generic(assemble(spec), 1.0)
    closed = {(e.m, e.m_prime): e.value
              for e in closed_form_spectrum("a", n, 1.0, 0.1)}
    for e in generic:
      self.assertIsNone(e.s)
      self.assertAllClose(e.value, closed[(e.m, e.m_prime)], atol=1e-9)

  @parameterized.parameters(1, 2, 3, 4, 5)
  def test_btc_effective_form(self, n):
    liouvillian = assemble(ModelSpec.for_model("btc", n, 1.0, 0.1))
    ss = build_superspin(liouvillian.ops)
    effective = effective_ld_btc(ss, n, 0.1)
    self.assertLess(effective_form_deviation(liouvillian, effective), 1e-10)

  @parameterized.parameters(ModelId.B, ModelId.C)
  def test_effective_forms(self, model):
    n = 4
    liouvillian = assemble(ModelSpec.for_model(model, n, 1.0, 0.3))
    ss = build_superspin(liouvillian.ops)
    effective = effective_ld(model, ss, n, 0.3)
    self.assertLess(effective_form_deviation(liouvillian, effective), 1e-10)

  def test_model_a_has_no_effective_form(self):
    ss = build_superspin(build_spin_ops(2))
    with self.assertRaises(InvalidArgumentError):
      effective_ld("a", ss, 2, 0.1)

  def test_rejects_wrong_omega(self):
    liouvillian = assemble(ModelSpec.for_model("btc", 2, 1.0, 0.1))
    with self.assertRaises(InvalidArgumentError):
      first_order_spectrum_generic(liouvillian, 0.7)
    with self.assertRaises(InvalidArgumentError):
      first_order_spectrum_generic(liouvillian, 0.0)

  def test_rejects_non_diagonal_coherent_part(self):
    ops = build_spin_ops(2)
    liouvillian = Liouvillian(l0=build_l0(-2.0 * ops.jx),
                              ld=build_ld([ops.jz], [0.2]), ops=ops)
    with self.assertRaises(InvalidArgumentError):
      first_order_spectrum_generic(liouvillian, 1.0)


class FirstOrderAccuracyTest(tf.test.TestCase):

  def test_btc_three_spins(self):
    self.assertLess(_mismatch("btc", 3, 0.1), 0.05)

  def test_residual_is_second_order(self):
    ratio = _mismatch("btc", 3, 0.1) / _mismatch("btc", 3, 0.05)
    self.assertBetween(ratio, 3.0, 5.0)

  def test_model_b_three_spins(self):
    self.assertLess(_mismatch("b", 3, 0.1), 0.05)

  def test_model_c_ten_spins(self):
    self.assertLess(_mismatch("c", 10, 0.1), 0.05)


if __name__ == "__main__":
  tf.test.main()
