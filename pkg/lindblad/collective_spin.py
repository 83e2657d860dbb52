"""Normalized collective spin operators in the maximally polarized sector.

For N spin-1/2 objects, J_alpha = (2/N) sum_i sigma_alpha^(i) / 2 restricted to
j = N/2, so every operator is a dense (N+1) x (N+1) matrix. Basis states are
ordered by descending magnetic quantum number (m = N/2 first), which puts the
nonzeros of J_- on the subdiagonal.
"""

import dataclasses
import enum

import numpy as np
import tensorflow as tf

from .errors import InvalidArgumentError


class Axis(enum.Enum):
  X = "x"
  Z = "z"


@dataclasses.dataclass(frozen=True)
class SpinOperatorSet:
  """Collective spin operators of N spins in the eigenbasis of `basis_axis`.

  Args:
    n_spins (int): Number of spins N.
    basis_axis (Axis): Axis whose operator is diagonal.
    jx, jy, jz (tf.Tensor): complex128 matrices of shape (N+1, N+1).
    j_plus, j_minus (tf.Tensor): Ladder operators of `basis_axis`, i.e.
      J_x +/- iJ_y for Z and J_+/-^(x) = J_y +/- iJ_z for X.
    j_squared (tf.Tensor): Casimir J^2.
  """
  n_spins: int
  basis_axis: Axis
  jx: tf.Tensor
  jy: tf.Tensor
  jz: tf.Tensor
  j_plus: tf.Tensor
  j_minus: tf.Tensor
  j_squared: tf.Tensor

  @property
  def dim(self):
    return self.n_spins + 1

  @property
  def quantum_numbers(self):
    """Magnetic quantum numbers m along `basis_axis`, descending."""
    return magnetic_numbers(self.n_spins)

  def component(self, axis):
    return self.jx if Axis(axis) is Axis.X else self.jz

  def standard_ladder(self):
    """Returns (J_+, J_-) = J_x +/- iJ_y expressed in this basis."""
    return self.jx + 1j * self.jy, self.jx - 1j * self.jy

  def identity(self):
    return tf.eye(self.dim, dtype=tf.complex128)

  def check_invariants(self):
    """Max deviations of the algebraic invariants of the set."""
    scale = 2.0 / self.n_spins
    ops = {"x": self.jx, "y": self.jy, "z": self.jz}
    hermitian = max(
      _max_abs(op - tf.linalg.adjoint(op)) for op in ops.values())
    cyclic = [("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")]
    algebra = max(
      _max_abs(commutator(ops[a], ops[b]) - 1j * scale * ops[c])
      for a, b, c in cyclic)
    j = self.n_spins / 2.0
    casimir = _max_abs(
      self.j_squared - scale ** 2 * j * (j + 1) * self.identity())
    return {"hermitian": hermitian, "commutator": algebra,
            "casimir": casimir}


def magnetic_numbers(n_spins):
  return n_spins / 2.0 - np.arange(n_spins + 1, dtype=np.float64)


def build_spin_ops(n_spins, basis_axis=Axis.Z):
  """Builds the collective spin operators for `n_spins` spins.

  The x basis is obtained by cyclic relabeling J_z -> J_x, J_x -> J_y,
  J_y -> J_z of the z-basis matrices, so J_x is real diagonal and the x-basis
  ladder operators are real.
  """
  if isinstance(n_spins, bool) or int(n_spins) != n_spins or n_spins < 1:
    raise InvalidArgumentError(
      f"Spin system needs at least one spin, got n_spins={n_spins}.")
  n_spins = int(n_spins)
  basis_axis = Axis(basis_axis)
  scale = 2.0 / n_spins
  j = n_spins / 2.0
  m = magnetic_numbers(n_spins)

  # <m-1| J_- |m> for m = j ... -j+1.
  lowering = scale * np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] - 1))
  j_minus = tf.linalg.diag(tf.constant(lowering, dtype=tf.complex128), k=-1)
  j_plus = tf.linalg.adjoint(j_minus)
  diagonal = tf.linalg.diag(tf.constant(scale * m, dtype=tf.complex128))
  along = (j_plus + j_minus) / 2
  across = (j_plus - j_minus) / 2j

  if basis_axis is Axis.Z:
    jx, jy, jz = along, across, diagonal
  else:
    jx, jy, jz = diagonal, along, across

  j_squared = (tf.linalg.matmul(jx, jx) + tf.linalg.matmul(jy, jy)
               + tf.linalg.matmul(jz, jz))
  return SpinOperatorSet(
    n_spins=n_spins, basis_axis=basis_axis, jx=jx, jy=jy, jz=jz,
    j_plus=j_plus, j_minus=j_minus, j_squared=j_squared)


def commutator(a, b):
  """Returns ab - ba."""
  a = tf.convert_to_tensor(a, dtype=tf.complex128)
  b = tf.convert_to_tensor(b, dtype=tf.complex128)
  if (a.shape.rank != 2 or a.shape[0] != a.shape[1]
      or a.shape != b.shape):
    raise InvalidArgumentError(
      f"Commutator needs square matrices of one shape, got {a.shape} "
      f"and {b.shape}.")
  return tf.linalg.matmul(a, b) - tf.linalg.matmul(b, a)


def ladder_product_identity_check(ops):
  """Max deviation of J_-/+ J_+/- = J^2 - J_a^2 -/+ (2/N) J_a.

  J_a is the diagonal operator of the set and J_+/- its ladder operators.
  """
  scale = 2.0 / ops.n_spins
  diagonal = ops.component(ops.basis_axis)
  base = ops.j_squared - tf.linalg.matmul(diagonal, diagonal)
  raise_first = tf.linalg.matmul(ops.j_minus, ops.j_plus)
  lower_first = tf.linalg.matmul(ops.j_plus, ops.j_minus)
  return max(_max_abs(raise_first - (base - scale * diagonal)),
             _max_abs(lower_first - (base + scale * diagonal)))


def axis_operator(ops, axis):
  """Returns J_x or J_z of `ops`."""
  try:
    return ops.component(Axis(axis))
  except ValueError as e:
    raise InvalidArgumentError(f"Unknown spin axis {axis!r}.") from e


def _max_abs(t):
  return float(tf.reduce_max(tf.abs(t)))
