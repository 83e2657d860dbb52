"""Time evolution of the collective magnetization.

Two routes are provided. The Ehrenfest route solves the closed linear system
for (<J_x>, <J_y>, <J_z>) that models B and C obey, analytically or through a
matrix exponential. The integrated route propagates the density matrix with
fixed-step RK4 in operator form, using only (N+1) x (N+1) products, so it
scales to N in the hundreds. All states live in the J_z eigenbasis.
"""

import cmath
import dataclasses
import enum

import numpy as np
import scipy.linalg
import tensorflow as tf
from absl import logging
from scipy.signal import find_peaks

from config import ConfigDynamics as cfg_dyn
from .collective_spin import Axis, build_spin_ops
from .errors import InvalidArgumentError, NumericalFailureError
from .models import ModelId, hamiltonian, jump_operator


class Provenance(enum.Enum):
  ANALYTIC = "analytic"
  INTEGRATED = "integrated"


class StateKind(enum.Enum):
  POLARIZED_Z = "polarized-z"
  POLARIZED_X = "polarized-x"
  COHERENT_MIX = "coherent-mix"


@dataclasses.dataclass(frozen=True)
class TimeSeries:
  """Sampled magnetization <J_alpha>(t) on a uniform grid (units 1/Omega)."""
  times: np.ndarray
  jx: np.ndarray
  jy: np.ndarray
  jz: np.ndarray
  provenance: Provenance

  def __len__(self):
    return len(self.times)

  def component(self, name):
    return {"jx": self.jx, "jy": self.jy, "jz": self.jz}[name]

  def max_deviation(self, other, name="jz"):
    if len(self) != len(other) or not np.allclose(self.times, other.times):
      raise InvalidArgumentError("Series are sampled on different grids.")
    return float(np.max(np.abs(self.component(name) - other.component(name))))


@dataclasses.dataclass(frozen=True)
class InitialState:
  jx: float
  jy: float
  jz: float

  @classmethod
  def from_density(cls, rho, ops=None):
    rho = tf.convert_to_tensor(rho, dtype=tf.complex128)
    if ops is None:
      ops = build_spin_ops(int(rho.shape[0]) - 1, Axis.Z)
    return cls(*(float(_expectation(j, rho))
                 for j in (ops.jx, ops.jy, ops.jz)))

  def as_vector(self):
    return np.array([self.jx, self.jy, self.jz], dtype=np.float64)


def _expectation(op, rho):
  return tf.math.real(tf.linalg.trace(tf.linalg.matmul(op, rho)))


def _top_projector(op):
  _, vectors = scipy.linalg.eigh(np.asarray(op))
  v = vectors[:, -1]
  return tf.constant(np.outer(v, v.conj()), dtype=tf.complex128)


def prepare_state(kind, n):
  """Pure spin-coherent state as a density matrix in the J_z basis.

  polarized-z: m_z = N/2. polarized-x: top eigenvector of J_x.
  coherent-mix: top eigenvector of (J_x + J_z)/sqrt(2).
  """
  kind = StateKind(kind)
  ops = build_spin_ops(n, Axis.Z)
  if kind is StateKind.POLARIZED_Z:
    rho = np.zeros((ops.dim, ops.dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    return tf.constant(rho)
  if kind is StateKind.POLARIZED_X:
    return _top_projector(ops.jx)
  return _top_projector((ops.jx + ops.jz) / np.sqrt(2.0))


def _rates(n, omega, gamma):
  return gamma / n, 2.0 * omega


def ehrenfest_eigenstructure(omega, kappa):
  """Eigenvalues of [[-2 kappa, omega], [-omega, 0]]: -kappa +/- sqrt(kappa^2 - omega^2)."""
  if not omega > 0:
    raise InvalidArgumentError(f"omega must be positive, got {omega}.")
  if not kappa >= 0:
    raise InvalidArgumentError(f"kappa must be non-negative, got {kappa}.")
  root = cmath.sqrt(kappa * kappa - omega * omega)
  return -kappa + root, -kappa - root


def ehrenfest_matrix(model_id, n, omega, gamma):
  """Generator M of d/dt (<J_x>, <J_y>, <J_z>) = M (<J_x>, <J_y>, <J_z>)."""
  model_id = ModelId(model_id)
  kappa, w = _rates(n, omega, gamma)
  if model_id is ModelId.B:
    return np.array([[-2 * kappa, 0.0, 0.0],
                     [0.0, -2 * kappa, w],
                     [0.0, -w, 0.0]])
  if model_id is ModelId.C:
    return np.array([[0.0, 0.0, 0.0],
                     [0.0, -2 * kappa, w],
                     [0.0, -w, -2 * kappa]])
  raise InvalidArgumentError(
    f"No closed Ehrenfest system for model {model_id.value}; use "
    f"integrate_master_equation.")


def evolve_ehrenfest(model_id, n, omega, gamma, init, times):
  """exp(M t) v0 for every t; valid in any damping regime."""
  m = ehrenfest_matrix(model_id, n, omega, gamma)
  times = np.asarray(times, dtype=np.float64)
  generators = tf.constant(m[None] * times[:, None, None], dtype=tf.float64)
  propagators = tf.linalg.expm(generators)
  v0 = tf.constant(init.as_vector(), dtype=tf.float64)
  values = tf.linalg.matvec(propagators, v0).numpy()
  return TimeSeries(times=times, jx=values[:, 0], jy=values[:, 1],
                    jz=values[:, 2], provenance=Provenance.ANALYTIC)


def analytic_jz(model_id, n, omega, gamma, init, times):
  """Closed-form magnetization for models B and C.

  model b: <J_z> = (c1 cos ft + c2 sin ft) e^{-kappa t}, f = sqrt(w^2 - kappa^2),
    c1 = <J_z(0)>, c2 = (kappa c1 - w <J_y(0)>) / f, <J_y> = -d<J_z>/dt / w.
  model c: (<J_y>, <J_z>) rotate at w under the envelope e^{-2 kappa t}.
  In both, <J_x> is fixed by its own decoupled equation.
  Here kappa = Gamma/N and w = 2 Omega.
  """
  model_id = ModelId(model_id)
  kappa, w = _rates(n, omega, gamma)
  t = np.asarray(times, dtype=np.float64)
  if model_id is ModelId.B:
    if kappa >= abs(w):
      raise InvalidArgumentError(
        f"Model b is overdamped for kappa={kappa:g} >= omega={abs(w):g}; the "
        f"oscillating solution needs kappa < omega (use evolve_ehrenfest).")
    f = np.sqrt(w * w - kappa * kappa)
    c1 = init.jz
    c2 = (kappa * c1 - w * init.jy) / f
    envelope = np.exp(-kappa * t)
    cos, sin = np.cos(f * t), np.sin(f * t)
    jz = envelope * (c1 * cos + c2 * sin)
    slope = envelope * ((f * c2 - kappa * c1) * cos - (kappa * c2 + f * c1) * sin)
    jy = -slope / w
    jx = init.jx * np.exp(-2 * kappa * t)
  elif model_id is ModelId.C:
    envelope = np.exp(-2 * kappa * t)
    cos, sin = np.cos(w * t), np.sin(w * t)
    jz = envelope * (init.jz * cos - init.jy * sin)
    jy = envelope * (init.jy * cos + init.jz * sin)
    jx = np.full_like(t, init.jx)
  else:
    raise InvalidArgumentError(
      f"Analytic series exist for models b and c only, got {model_id.value}.")
  return TimeSeries(times=t, jx=jx, jy=jy, jz=jz,
                    provenance=Provenance.ANALYTIC)


def adjoint_generator(spec, ops, observable):
  """Heisenberg-picture generator i[H, O] + N Gamma (A^dag O A - {A^dag A, O}/2)."""
  o = tf.convert_to_tensor(observable, dtype=tf.complex128)
  h = hamiltonian(spec, ops)
  a = jump_operator(spec, ops)
  a_dag = tf.linalg.adjoint(a)
  k = tf.linalg.matmul(a_dag, a)
  coherent = 1j * (tf.linalg.matmul(h, o) - tf.linalg.matmul(o, h))
  dissipative = (a_dag @ o @ a
                 - 0.5 * (tf.linalg.matmul(k, o) + tf.linalg.matmul(o, k)))
  return coherent + complex(spec.rate) * dissipative


class _LindbladPropagator(tf.Module):
  """RK4 propagation of drho/dt = -i[H, rho] + g (A rho A^dag - {A^dag A, rho}/2)."""

  def __init__(self, h, jump, rate, dt, name=None):
    super().__init__(name=name)
    self._h = tf.convert_to_tensor(h, dtype=tf.complex128)
    self._a = tf.convert_to_tensor(jump, dtype=tf.complex128)
    self._a_dag = tf.linalg.adjoint(self._a)
    self._k = tf.linalg.matmul(self._a_dag, self._a)
    self._rate = tf.constant(rate, dtype=tf.complex128)
    self._dt = tf.constant(dt, dtype=tf.complex128)

  def _rhs(self, rho):
    # rho stays Hermitian, so rho H = (H rho)^dag.
    h_rho = tf.linalg.matmul(self._h, rho)
    k_rho = tf.linalg.matmul(self._k, rho)
    jump = self._a @ rho @ self._a_dag
    coherent = -1j * (h_rho - tf.linalg.adjoint(h_rho))
    return coherent + self._rate * (
      jump - 0.5 * (k_rho + tf.linalg.adjoint(k_rho)))

  @tf.function
  def advance(self, rho, n_steps):
    dt = self._dt
    for _ in tf.range(n_steps):
      k1 = self._rhs(rho)
      k2 = self._rhs(rho + 0.5 * dt * k1)
      k3 = self._rhs(rho + 0.5 * dt * k2)
      k4 = self._rhs(rho + dt * k3)
      rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
      rho = 0.5 * (rho + tf.linalg.adjoint(rho))
    return rho


def _check_density(rho):
  m = rho.numpy()
  tol = cfg_dyn.state_tol
  if np.abs(m - m.conj().T).max() > tol:
    raise InvalidArgumentError("Initial state is not Hermitian.")
  if abs(np.trace(m) - 1.0) > tol:
    raise InvalidArgumentError(
      f"Initial state has trace {np.trace(m).real:.12g}, expected 1.")
  if scipy.linalg.eigvalsh(m).min() < -tol:
    raise InvalidArgumentError("Initial state is not positive semidefinite.")


def stability_number(spec, dt):
  return dt * spec.n_spins * (spec.gamma + abs(spec.omega))


def integrate_master_equation(spec, rho0, t_max, dt=cfg_dyn.default_dt,
                              sample_dt=cfg_dyn.sample_dt):
  """Integrates the master equation of `spec` from rho0 (J_z basis).

  Args:
    spec (ModelSpec): Model and parameters.
    rho0: (N+1) x (N+1) density matrix in the J_z eigenbasis.
    t_max (float): Final time.
    dt (float): RK4 step.
    sample_dt (float): Output spacing, rounded to a whole number of steps.

  Returns:
    TimeSeries with Provenance.INTEGRATED, first sample at t = 0.
  """
  if not t_max > 0:
    raise InvalidArgumentError(f"t_max must be positive, got {t_max}.")
  if not dt > 0:
    raise InvalidArgumentError(f"dt must be positive, got {dt}.")
  ops = build_spin_ops(spec.n_spins, Axis.Z)
  rho = tf.convert_to_tensor(rho0, dtype=tf.complex128)
  if tuple(rho.shape) != (ops.dim, ops.dim):
    raise InvalidArgumentError(
      f"rho0 must be {ops.dim}x{ops.dim} for N={spec.n_spins}, got "
      f"{tuple(rho.shape)}.")
  _check_density(rho)

  stiffness = stability_number(spec, dt)
  if stiffness >= cfg_dyn.stability_limit:
    raise InvalidArgumentError(
      f"dt*N*(Gamma+|Omega|) = {stiffness:.3g} is beyond the RK4 stability "
      f"limit {cfg_dyn.stability_limit}; reduce dt.")
  if stiffness >= cfg_dyn.stability_warn:
    logging.warning("dt*N*(Gamma+|Omega|) = %.3g exceeds %.2g; RK4 accuracy "
                    "may degrade.", stiffness, cfg_dyn.stability_warn)

  stride = max(1, int(round(sample_dt / dt)))
  n_samples = int(round(t_max / (dt * stride)))
  propagator = _LindbladPropagator(hamiltonian(spec, ops),
                                   jump_operator(spec, ops), spec.rate, dt)
  stride_t = tf.constant(stride, dtype=tf.int32)

  observables = (ops.jx, ops.jy, ops.jz)
  samples = np.zeros((n_samples + 1, 3))
  drift = 0.0
  for k in range(n_samples + 1):
    if k > 0:
      rho = propagator.advance(rho, stride_t)
    trace = complex(tf.linalg.trace(rho).numpy())
    drift = abs(trace - 1.0)
    if not np.isfinite(drift) or drift > cfg_dyn.trace_drift_limit:
      raise NumericalFailureError(
        f"Trace drifted by {drift:.3e} at t={k * stride * dt:g}; "
        f"reduce dt.", index=k * stride)
    samples[k] = [float(_expectation(j, rho)) for j in observables]

  logging.info("Integrated model %s to t=%g: %d steps, final trace drift "
               "%.2e.", spec.model_id.value, n_samples * stride * dt,
               n_samples * stride, drift)
  times = np.arange(n_samples + 1) * stride * dt
  return TimeSeries(times=times, jx=samples[:, 0], jy=samples[:, 1],
                    jz=samples[:, 2], provenance=Provenance.INTEGRATED)


def quarter_period_lag(series, period):
  """Lag of <J_y> behind <J_z> at the peak of their normalized correlation.

  Lags in [0, period/2] are searched. The correlation window is a whole
  number of oscillation periods and stays fixed for every lag.
  """
  z, y = series.jz, series.jy
  spacing = series.times[1] - series.times[0]
  max_k = int(round(0.5 * period / spacing))
  per_period = period / spacing
  window = int(round(np.floor((len(z) - max_k) / per_period) * per_period))
  if max_k < 1 or window < 1:
    raise InvalidArgumentError(
      f"Series of length {len(z)} cannot hold one period {period:g} plus "
      f"half a period of lag.")
  head = z[:window]
  scores = np.empty(max_k + 1)
  for k in range(max_k + 1):
    tail = y[k:k + window]
    scores[k] = (head @ tail) / np.sqrt((head @ head) * (tail @ tail))
  return float(np.argmax(scores) * spacing)


def fit_decay_rate(times, values):
  """Exponential decay rate from a log-linear fit to the peaks of |values|."""
  times = np.asarray(times, dtype=np.float64)
  magnitude = np.abs(np.asarray(values, dtype=np.float64))
  peaks, _ = find_peaks(magnitude)
  if len(peaks) < 2:
    raise InvalidArgumentError(
      f"Need at least two oscillation peaks to fit a decay, found {len(peaks)}.")
  slope, _ = np.polyfit(times[peaks], np.log(magnitude[peaks]), 1)
  return float(-slope)
