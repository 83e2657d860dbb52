"""Vectorized master equations and the superspin operators.

Operators are vectorized row-major, |m><n| -> |m>(x)|n>*, so that
vec(A rho B) = (A (x) B^T) vec(rho) holds for any A and B.
"""

import dataclasses
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
import tensorflow as tf
from einops import rearrange

from config import ConfigSuperop as cfg_superop
from .collective_spin import Axis, magnetic_numbers
from .errors import InvalidArgumentError, NumericalFailureError


@dataclasses.dataclass(frozen=True)
class SuperVector:
  data: tf.Tensor
  n_spins: int


@dataclasses.dataclass(frozen=True)
class Liouvillian:
  """A Liouvillian split into its coherent and dissipative parts.

  Args:
    l0 (tf.Tensor): -i(H (x) I - I (x) H^T).
    ld (tf.Tensor): Lindblad dissipator superoperator.
    model: The ModelSpec it was assembled from (None for hand-built ones).
    ops: The SpinOperatorSet fixing the working basis.
  """
  l0: tf.Tensor
  ld: tf.Tensor
  model: Optional[object] = None
  ops: Optional[object] = None

  @property
  def total(self):
    return self.l0 + self.ld

  @property
  def dim(self):
    return int(self.l0.shape[0])

  def apply(self, rho):
    """Returns L(rho) as a matrix."""
    v = vectorize(rho)
    out = tf.linalg.matvec(self.total, v.data)
    return devectorize(SuperVector(out, v.n_spins))

  def trace_annihilation_norm(self):
    """Norm of vec(I)^dagger L; zero for a trace-preserving generator."""
    d = int(round(np.sqrt(self.dim)))
    identity = vectorize(tf.eye(d, dtype=tf.complex128)).data
    row = tf.linalg.matvec(self.total, identity, adjoint_a=True)
    return float(tf.norm(row))


@dataclasses.dataclass(frozen=True)
class SuperspinSet:
  """S_alpha = J_alpha (x) I - I (x) J_alpha^T and S^2."""
  sx: tf.Tensor
  sy: tf.Tensor
  sz: tf.Tensor
  s_squared: tf.Tensor
  n_spins: int
  basis_axis: Axis

  @property
  def axis_projection(self):
    """S_x for the x basis, S_z for the z basis; diagonal in either case."""
    return self.sx if self.basis_axis is Axis.X else self.sz


@dataclasses.dataclass(frozen=True)
class CoupledBasis:
  """Orthonormal simultaneous eigenvectors of S^2 and the axis projection.

  Args:
    vectors (np.ndarray): (N+1)^2 x (N+1)^2 matrix, one superket per column.
    labels (list): (s, s_x) per column.
    residual (float): Largest simultaneous-eigen residual norm.
  """
  vectors: np.ndarray
  labels: List[Tuple[int, int]]
  n_spins: int
  residual: float

  def vector(self, s, s_x):
    return self.vectors[:, self.labels.index((s, s_x))]


def kron(a, b):
  """Kronecker product a (x) b in the row-major superket ordering."""
  a = tf.convert_to_tensor(a, dtype=tf.complex128)
  b = tf.convert_to_tensor(b, dtype=tf.complex128)
  return rearrange(tf.einsum("ik,jl->ijkl", a, b), "i j k l -> (i j) (k l)")


def vectorize(rho):
  rho = tf.convert_to_tensor(rho, dtype=tf.complex128)
  if rho.shape.rank != 2 or rho.shape[0] != rho.shape[1]:
    raise InvalidArgumentError(
      f"Only square operators can be vectorized, got shape {rho.shape}.")
  return SuperVector(rearrange(rho, "m n -> (m n)"), int(rho.shape[0]) - 1)


def devectorize(v):
  d = v.n_spins + 1
  return rearrange(v.data, "(m n) -> m n", m=d, n=d)


def superket_labels(n_spins):
  """(m, m') for each superket index, m descending along the working axis."""
  m = magnetic_numbers(n_spins)
  return [(a, b) for a in m for b in m]


def build_l0(h):
  """Coherent part -i(H (x) I - I (x) H^T) for a Hermitian Hamiltonian."""
  h = tf.convert_to_tensor(h, dtype=tf.complex128)
  if h.shape.rank != 2 or h.shape[0] != h.shape[1]:
    raise InvalidArgumentError(f"Hamiltonian must be square, got {h.shape}.")
  deviation = float(tf.reduce_max(tf.abs(h - tf.linalg.adjoint(h))))
  if deviation > cfg_superop.hermitian_input_tol:
    raise InvalidArgumentError(
      f"Hamiltonian is not Hermitian (max deviation {deviation:.3e}).")
  identity = tf.eye(h.shape[0], dtype=tf.complex128)
  return -1j * (kron(h, identity) - kron(identity, tf.transpose(h)))


def build_ld(jumps, rates, dim=None):
  """Dissipator sum_i gamma_i (A (x) A* - (A^dag A (x) I + I (x) (A^dag A)^T) / 2).

  Args:
    jumps (list): Jump operators A_i, square of one dimension.
    rates (list): Non-negative rates gamma_i.
    dim (int, optional): Operator dimension; only needed for an empty list.
  """
  if len(jumps) != len(rates):
    raise InvalidArgumentError(
      f"Got {len(jumps)} jump operators but {len(rates)} rates.")
  if not jumps:
    if dim is None:
      raise InvalidArgumentError("An empty dissipator needs its dimension.")
    return tf.zeros((dim * dim, dim * dim), dtype=tf.complex128)

  jumps = [tf.convert_to_tensor(a, dtype=tf.complex128) for a in jumps]
  d = int(jumps[0].shape[0])
  for a in jumps:
    if a.shape != (d, d):
      raise InvalidArgumentError(
        f"Jump operators must all be {d}x{d}, got {a.shape}.")
  identity = tf.eye(d, dtype=tf.complex128)
  ld = tf.zeros((d * d, d * d), dtype=tf.complex128)
  for a, rate in zip(jumps, rates):
    if rate < 0:
      raise InvalidArgumentError(f"Rates must be non-negative, got {rate}.")
    a_dag_a = tf.linalg.matmul(a, a, adjoint_a=True)
    term = (kron(a, tf.math.conj(a))
            - 0.5 * (kron(a_dag_a, identity)
                     + kron(identity, tf.transpose(a_dag_a))))
    ld += complex(float(rate)) * term
  return ld


def build_superspin(ops):
  """Superspin operators of a SpinOperatorSet.

  S^2 is formed both as sum_alpha S_alpha^2 and from the closed form
  J^2 (x) I + I (x) J^2 - 2 J_a (x) J_a - (J_+ (x) J_+ + J_- (x) J_-), with
  J_a the diagonal axis operator and J_+/- its ladder operators. The two must
  agree.
  """
  identity = ops.identity()

  def project(j):
    return kron(j, identity) - kron(identity, tf.transpose(j))

  sx, sy, sz = project(ops.jx), project(ops.jy), project(ops.jz)
  s_squared = (tf.linalg.matmul(sx, sx) + tf.linalg.matmul(sy, sy)
               + tf.linalg.matmul(sz, sz))

  diagonal = ops.component(ops.basis_axis)
  closed_form = (kron(ops.j_squared, identity) + kron(identity, ops.j_squared)
                 - 2.0 * kron(diagonal, diagonal)
                 - (kron(ops.j_plus, ops.j_plus)
                    + kron(ops.j_minus, ops.j_minus)))
  deviation = float(tf.reduce_max(tf.abs(s_squared - closed_form)))
  if deviation > cfg_superop.s_squared_self_check_tol:
    raise NumericalFailureError(
      f"S^2 closed form disagrees with sum of squares by {deviation:.3e}.")
  return SuperspinSet(sx=sx, sy=sy, sz=sz, s_squared=s_squared,
                      n_spins=ops.n_spins, basis_axis=ops.basis_axis)


def superspin_quantum_number(eigenvalue, n_spins):
  """Continuous s solving (2/N)^2 s(s+1) = eigenvalue."""
  scaled = max(float(np.real(eigenvalue)), 0.0) * (n_spins / 2.0) ** 2
  return (-1.0 + np.sqrt(1.0 + 4.0 * scaled)) / 2.0


def build_coupled_basis(ss):
  """Simultaneous eigenbasis |s, s_x>> of the axis projection and S^2.

  The axis projection is diagonal in the product basis, so each of its
  eigenspaces is a set of superket indices; S^2 is diagonalized inside each.
  Each vector's phase makes its largest component real and positive.
  """
  n = ss.n_spins
  s_axis = ss.axis_projection.numpy()
  s_squared = ss.s_squared.numpy()
  dim = s_axis.shape[0]
  projections = np.rint(np.real(np.diag(s_axis)) * n / 2.0).astype(int)

  vectors = np.zeros((dim, dim), dtype=np.complex128)
  labels = []
  column = 0
  for s_x in range(n, -n - 1, -1):
    idx = np.flatnonzero(projections == s_x)
    block = s_squared[np.ix_(idx, idx)]
    values, local = scipy.linalg.eigh(0.5 * (block + block.conj().T))
    # Largest s first inside each s_x group.
    for k in np.argsort(-values, kind="stable"):
      s = int(np.rint(superspin_quantum_number(values[k], n)))
      expected = s_squared_eigenvalue(s, n)
      if abs(values[k] - expected) > cfg_superop.s_squared_group_rtol * max(
          1.0, expected):
        raise NumericalFailureError(
          f"S^2 eigenvalue {values[k]:.6g} in the s_x={s_x} sector is not "
          f"of the form (2/N)^2 s(s+1).", index=column)
      v = np.zeros(dim, dtype=np.complex128)
      v[idx] = local[:, k]
      pivot = v[np.argmax(np.abs(v))]
      vectors[:, column] = v * (abs(pivot) / pivot)
      labels.append((s, s_x))
      column += 1

  residual = _coupled_residual(vectors, labels, s_axis, s_squared, n)
  if residual > cfg_superop.coupled_residual_tol:
    raise NumericalFailureError(
      f"Coupled basis residual {residual:.3e} exceeds "
      f"{cfg_superop.coupled_residual_tol:.1e}.")
  return CoupledBasis(vectors=vectors, labels=labels, n_spins=n,
                      residual=residual)


def s_squared_eigenvalue(s, n_spins):
  return (2.0 / n_spins) ** 2 * s * (s + 1)


def _coupled_residual(vectors, labels, s_axis, s_squared, n):
  worst = 0.0
  for k, (s, s_x) in enumerate(labels):
    v = vectors[:, k]
    worst = max(
      worst,
      np.linalg.norm(s_axis @ v - (2.0 / n) * s_x * v),
      np.linalg.norm(s_squared @ v - s_squared_eigenvalue(s, n) * v))
  return float(worst)
