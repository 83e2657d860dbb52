"""Tests of the Ehrenfest closed forms and the RK4 master-equation integrator."""

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from lindblad.collective_spin import Axis, build_spin_ops
from lindblad.dynamics import (InitialState, Provenance, StateKind,
                               adjoint_generator, analytic_jz,
                               ehrenfest_eigenstructure, ehrenfest_matrix,
                               evolve_ehrenfest, fit_decay_rate,
                               integrate_master_equation, prepare_state,
                               quarter_period_lag)
from lindblad.errors import InvalidArgumentError
from lindblad.models import ModelSpec

POLARIZED = InitialState(jx=0.0, jy=0.0, jz=1.0)


class InitialStateTest(tf.test.TestCase, parameterized.TestCase):

  def test_polarized_z_two_spins(self):
    self.assertAllClose(prepare_state("polarized-z", 2), np.diag([1, 0, 0]))

  @parameterized.parameters(1, 5, 20)
  def test_polarized_z_magnetization(self, n):
    init = InitialState.from_density(prepare_state(StateKind.POLARIZED_Z, n))
    self.assertAllClose(init.jz, 1.0)
    self.assertAllClose(init.jy, 0.0)
    self.assertAllClose(init.jx, 0.0)

  @parameterized.parameters(1, 6)
  def test_polarized_x_magnetization(self, n):
    init = InitialState.from_density(prepare_state("polarized-x", n))
    self.assertAllClose(init.as_vector(), [1.0, 0.0, 0.0], atol=1e-12)

  def test_coherent_mix_magnetization(self):
    init = InitialState.from_density(prepare_state("coherent-mix", 8))
    half = np.sqrt(0.5)
    self.assertAllClose(init.as_vector(), [half, 0.0, half], atol=1e-12)

  def test_states_are_pure(self):
    for kind in StateKind:
      rho = prepare_state(kind, 4).numpy()
      self.assertAllClose(np.trace(rho), 1.0)
      self.assertAllClose(rho @ rho, rho, atol=1e-12)


class EhrenfestTest(tf.test.TestCase, parameterized.TestCase):

  def test_eigenstructure_undamped(self):
    plus, minus = ehrenfest_eigenstructure(2.0, 0.0)
    self.assertAllClose(plus, 2j)
    self.assertAllClose(minus, -2j)

  def test_eigenstructure_weak_damping(self):
    plus, minus = ehrenfest_eigenstructure(2.0, 0.02)
    self.assertAllClose(plus, -0.02 + 1.9999j, atol=1e-4)
    self.assertAllClose(minus, -0.02 - 1.9999j, atol=1e-4)
    m = np.array([[-0.04, 2.0], [-2.0, 0.0]])
    self.assertAllClose(np.sort_complex([plus, minus]),
                        np.sort_complex(np.linalg.eigvals(m)))

  def test_eigenstructure_critical(self):
    plus, minus = ehrenfest_eigenstructure(1.5, 1.5)
    self.assertAllClose(plus, -1.5)
    self.assertAllClose(minus, -1.5)

  @parameterized.parameters((0.0, 0.1), (2.0, -0.1))
  def test_eigenstructure_rejects(self, omega, kappa):
    with self.assertRaises(InvalidArgumentError):
      ehrenfest_eigenstructure(omega, kappa)

  def test_model_b_constants(self):
    times = np.linspace(0.0, 20.0, 401)
    series = analytic_jz("b", 100, 1.0, 2.0, POLARIZED, times)
    kappa = 0.02
    f = 2.0 * np.sqrt(1.0 - 1e-4)
    expected = np.exp(-kappa * times) * (
      np.cos(f * times) + kappa / f * np.sin(f * times))
    self.assertAllClose(series.jz, expected)
    self.assertAllClose(kappa / f, 0.0100, atol=1e-4)
    self.assertAllClose(series.jy[0], 0.0)
    self.assertEqual(series.provenance, Provenance.ANALYTIC)

  def test_undamped_is_pure_cosine(self):
    times = np.linspace(0.0, 10.0, 101)
    series = analytic_jz("b", 10, 1.0, 0.0, POLARIZED, times)
    self.assertAllClose(series.jz, np.cos(2.0 * times))

  def test_model_c_envelope(self):
    times = np.pi / 2.0 * np.arange(12)
    series = analytic_jz("c", 100, 1.0, 2.0, POLARIZED, times)
    self.assertAllClose(np.abs(series.jz), np.exp(-0.04 * times))

  def test_overdamped_model_b_rejected(self):
    with self.assertRaises(InvalidArgumentError):
      analytic_jz("b", 1, 1.0, 3.0, POLARIZED, [0.0, 1.0])

  def test_no_closed_form_for_btc(self):
    with self.assertRaises(InvalidArgumentError):
      analytic_jz("btc", 3, 1.0, 0.1, POLARIZED, [0.0])

  @parameterized.parameters("b", "c")
  def test_matrix_exponential_agrees(self, model):
    times = np.linspace(0.0, 15.0, 151)
    init = InitialState(jx=0.3, jy=-0.4, jz=0.5)
    closed = analytic_jz(model, 20, 1.0, 1.5, init, times)
    propagated = evolve_ehrenfest(model, 20, 1.0, 1.5, init, times)
    for name in ("jx", "jy", "jz"):
      self.assertAllClose(propagated.component(name), closed.component(name),
                          atol=1e-10)

  def test_overdamped_matrix_exponential_decays(self):
    times = np.linspace(0.0, 5.0, 51)
    series = evolve_ehrenfest("b", 1, 1.0, 3.0, POLARIZED, times)
    self.assertTrue(np.all(series.jz > 0.0))
    self.assertTrue(np.all(np.diff(series.jz) <= 1e-12))

  @parameterized.parameters("b", "c")
  def test_heisenberg_generator_closes(self, model):
    n, omega, gamma = 5, 1.0, 0.3
    ops = build_spin_ops(n, Axis.Z)
    spec = ModelSpec.for_model(model, n, omega, gamma)
    m = ehrenfest_matrix(model, n, omega, gamma)
    basis = (ops.jx, ops.jy, ops.jz)
    for row, observable in zip(m, basis):
      expected = sum(c * j for c, j in zip(row, basis))
      self.assertAllClose(adjoint_generator(spec, ops, observable), expected,
                          atol=1e-12)


class IntegrationTest(tf.test.TestCase, parameterized.TestCase):

  def test_closed_system_precession(self):
    spec = ModelSpec.for_model("b", 4, 1.0, 0.0)
    series = integrate_master_equation(spec, prepare_state("polarized-z", 4),
                                       20.0, 1e-3)
    self.assertAllClose(series.jz, np.cos(2.0 * series.times), atol=1e-6)
    self.assertEqual(series.provenance, Provenance.INTEGRATED)
    self.assertAllClose(series.times[:3], [0.0, 0.01, 0.02])

  @parameterized.parameters("b", "c")
  def test_matches_closed_form_at_one_hundred_spins(self, model):
    n, omega, gamma = 100, 1.0, 2.0
    spec = ModelSpec.for_model(model, n, omega, gamma)
    series = integrate_master_equation(spec, prepare_state("polarized-z", n),
                                       20.0, 1e-3)
    closed = analytic_jz(model, n, omega, gamma, POLARIZED, series.times)
    self.assertLess(series.max_deviation(closed), 1e-4)
    for name in ("jx", "jy", "jz"):
      self.assertLessEqual(np.abs(series.component(name)).max(), 1.0 + 1e-9)

  def test_transverse_decay(self):
    n, gamma = 20, 2.0
    spec = ModelSpec.for_model("b", n, 1.0, gamma)
    rho0 = prepare_state("coherent-mix", n)
    series = integrate_master_equation(spec, rho0, 10.0, 1e-3)
    jx0 = InitialState.from_density(rho0).jx
    self.assertAllClose(series.jx, jx0 * np.exp(-2 * gamma / n * series.times),
                        atol=1e-5)

  def test_quarter_period_phase_lag(self):
    n, omega, gamma = 20, 1.0, 0.04
    spec = ModelSpec.for_model("b", n, omega, gamma)
    series = integrate_master_equation(spec, prepare_state("polarized-z", n),
                                       20.0, 1e-3)
    kappa, w = gamma / n, 2.0 * omega
    period = 2 * np.pi / np.sqrt(w * w - kappa * kappa)
    spacing = series.times[1] - series.times[0]
    lag = quarter_period_lag(series, period)
    self.assertAllClose(lag, period / 4, atol=spacing)

  def test_decay_rate_halves_with_size(self):
    rates = []
    for n in (25, 50, 100):
      spec = ModelSpec.for_model("c", n, 1.0, 2.0)
      series = integrate_master_equation(spec, prepare_state("polarized-z", n),
                                         10.0, 1e-3)
      rates.append(fit_decay_rate(series.times, series.jz))
    self.assertAllClose(rates, [0.16, 0.08, 0.04], rtol=0.05)
    self.assertAllClose(rates[0] / rates[1], 2.0, rtol=0.05)
    self.assertAllClose(rates[1] / rates[2], 2.0, rtol=0.05)

  def test_argument_errors(self):
    spec = ModelSpec.for_model("btc", 3, 1.0, 0.1)
    rho = prepare_state("polarized-z", 3)
    with self.assertRaises(InvalidArgumentError):
      integrate_master_equation(spec, rho, 0.0, 1e-3)
    with self.assertRaises(InvalidArgumentError):
      integrate_master_equation(spec, rho, 1.0, -1e-3)
    with self.assertRaises(InvalidArgumentError):
      integrate_master_equation(spec, prepare_state("polarized-z", 2), 1.0)
    with self.assertRaises(InvalidArgumentError):
      integrate_master_equation(spec, 2.0 * rho, 1.0)
    with self.assertRaises(InvalidArgumentError):
      integrate_master_equation(spec, np.diag([1.5, -0.5, 0, 0]), 1.0)

  def test_stability_limit(self):
    spec = ModelSpec.for_model("b", 100, 1.0, 2.0)
    with self.assertRaises(InvalidArgumentError):
      integrate_master_equation(spec, prepare_state("polarized-z", 100), 1.0,
                                1e-2)

  def test_fit_needs_peaks(self):
    with self.assertRaises(InvalidArgumentError):
      fit_decay_rate([0.0, 1.0, 2.0], [1.0, 0.5, 0.25])


if __name__ == "__main__":
  tf.test.main()
