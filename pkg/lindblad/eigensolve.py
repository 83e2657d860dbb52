"""Dense complex eigensolver for non-Hermitian matrices.

The matrix is balanced by a diagonal similarity, reduced to Hessenberg form and
brought to complex Schur form by shifted QR (LAPACK zhseqr through
scipy.linalg.schur). Eigenvectors come from back-substitution on the upper
triangular Schur factor. Defective matrices are not an error: the affected
pairs keep large residuals and are flagged in `EigenResult.defective`.
"""

import dataclasses
from typing import Optional

import numpy as np
import scipy.linalg
from absl import logging

from config import ConfigEigensolve as cfg_eig
from .errors import InvalidArgumentError, NumericalFailureError


@dataclasses.dataclass(frozen=True)
class EigenResult:
  """Eigenvalues sorted by (Re descending, Im ascending).

  Args:
    values (np.ndarray): Eigenvalues with multiplicity.
    vectors (np.ndarray, optional): Unit-norm right eigenvectors as columns.
    residuals (np.ndarray, optional): ||M v - lambda v|| per pair.
    defective (np.ndarray, optional): Pairs whose residual exceeds
      residual_rtol * ||M||.
  """
  values: np.ndarray
  vectors: Optional[np.ndarray] = None
  residuals: Optional[np.ndarray] = None
  defective: Optional[np.ndarray] = None


def _as_matrix(m):
  a = np.array(m, dtype=np.complex128)
  if a.ndim != 2 or a.shape[0] != a.shape[1]:
    raise InvalidArgumentError(f"Expected a square matrix, got shape {a.shape}.")
  if not np.all(np.isfinite(a)):
    raise InvalidArgumentError("Matrix has non-finite entries.")
  return a


def schur(m):
  """Balanced complex Schur factorization.

  Returns:
    (t, z, scale): upper triangular t and unitary z with
    diag(scale)^-1 m diag(scale) = z t z^H.
  """
  a = _as_matrix(m)
  if a.shape[0] == 0:
    return a, a, np.ones(0)
  balanced, scale = scipy.linalg.matrix_balance(
    a, permute=False, separate=True)
  scale = scale[0]
  h, q = scipy.linalg.hessenberg(balanced, calc_q=True)
  try:
    t, z = scipy.linalg.schur(h, output="complex")
  except scipy.linalg.LinAlgError as e:
    index = _failed_index(str(e))
    raise NumericalFailureError(
      f"Shifted QR did not converge: {e}", index=index) from e
  return t, q @ z, scale


def _failed_index(message):
  digits = "".join(c if c.isdigit() else " " for c in message).split()
  return int(digits[-1]) if digits else None


def _triangular_eigenvectors(t):
  """Right eigenvectors of an upper triangular matrix, one per column."""
  n = t.shape[0]
  vectors = np.zeros((n, n), dtype=np.complex128)
  norm = max(np.abs(t).max(), 1.0)
  floor = cfg_eig.pivot_floor * norm
  for k in range(n):
    lam = t[k, k]
    x = np.zeros(n, dtype=np.complex128)
    x[k] = 1.0
    for i in range(k - 1, -1, -1):
      pivot = t[i, i] - lam
      if abs(pivot) < floor:
        pivot = floor
      x[i] = -(t[i, i + 1:k + 1] @ x[i + 1:k + 1]) / pivot
    vectors[:, k] = x
  return vectors


def eig(m, want_vectors=False):
  """Full spectrum of a dense complex matrix."""
  a = _as_matrix(m)
  t, z, scale = schur(a)
  values = np.diag(t).copy()
  order = np.lexsort((np.round(values.imag, cfg_eig.sort_decimals),
                      -np.round(values.real, cfg_eig.sort_decimals)))
  values = values[order]
  if not want_vectors:
    return EigenResult(values=values)

  vectors = scale[:, None] * (z @ _triangular_eigenvectors(t))
  vectors = vectors[:, order]
  vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
  residuals = np.linalg.norm(a @ vectors - vectors * values[None, :], axis=0)
  bound = cfg_eig.residual_rtol * max(np.linalg.norm(a, 2), 1e-300)
  defective = residuals > bound
  if defective.any():
    logging.warning("%d of %d eigenpairs exceed the residual bound %.2e "
                    "(defective or near-defective matrix).",
                    int(defective.sum()), len(values), bound)
  return EigenResult(values=values, vectors=vectors, residuals=residuals,
                     defective=defective)
