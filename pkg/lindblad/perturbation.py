"""First-order degenerate perturbation theory on L = L0 + L_D.

L0 is diagonal in the working basis with eigenvalues 2i Omega s_x, so its
degenerate subspaces are the s_x sectors. The first-order shifts are the
eigenvalues of L_D projected onto each sector. The closed forms below are the
analytic results of the superspin method for the four catalog models.
"""

import dataclasses
from typing import Optional

import numpy as np
import scipy.linalg
from absl import logging
from scipy.optimize import linear_sum_assignment

from config import ConfigPerturbation as cfg_pt
from .errors import InvalidArgumentError
from .eigensolve import eig
from .models import ModelId
from .superop import (build_coupled_basis, build_superspin, superket_labels,
                      superspin_quantum_number)


@dataclasses.dataclass(frozen=True)
class PerturbativeEigenvalue:
  """lambda0 + shift1 with its quantum numbers.

  Coupled-basis results carry (s, s_x); product-basis results carry (m, m').
  `s` is None when the superspin label could not be resolved, and for the
  model C closed form, whose eigenvalues do not depend on s.
  """
  lambda0: complex
  shift1: complex
  model_id: Optional[ModelId] = None
  s: Optional[int] = None
  s_x: Optional[int] = None
  m: Optional[float] = None
  m_prime: Optional[float] = None

  @property
  def value(self):
    return self.lambda0 + self.shift1


def values_of(eigenvalues):
  return np.array([e.value for e in eigenvalues], dtype=np.complex128)


def btc_spectrum_closed_form(n, omega, gamma):
  """lambda_{s,s_x} = 2i Omega s_x - (Gamma/N)(s_x^2 + s(s+1))."""
  return [
    PerturbativeEigenvalue(
      lambda0=2j * omega * s_x,
      shift1=complex(-(gamma / n) * (s_x ** 2 + s * (s + 1))),
      model_id=ModelId.BTC, s=s, s_x=s_x)
    for s in range(n + 1) for s_x in range(-s, s + 1)]


def model_a_spectrum_closed_form(n, omega, gamma):
  """lambda_{m,m'} = 2i Omega (m - m') - (2 Gamma/N)(N(N/2+1) - m(m+1) - m'(m'+1))."""
  out = []
  for m, m_prime in superket_labels(n):
    shift = -(2.0 * gamma / n) * (
      n * (n / 2.0 + 1) - m * (m + 1) - m_prime * (m_prime + 1))
    out.append(PerturbativeEigenvalue(
      lambda0=2j * omega * (m - m_prime), shift1=complex(shift),
      model_id=ModelId.A, s_x=int(round(m - m_prime)), m=m, m_prime=m_prime))
  return out


def model_b_spectrum_closed_form(n, omega, gamma):
  """lambda_{s,s_x} = 2i Omega s_x + (Gamma/N)(s_x^2 - s(s+1))."""
  return [
    PerturbativeEigenvalue(
      lambda0=2j * omega * s_x,
      shift1=complex((gamma / n) * (s_x ** 2 - s * (s + 1))),
      model_id=ModelId.B, s=s, s_x=s_x)
    for s in range(n + 1) for s_x in range(-s, s + 1)]


def model_c_spectrum_closed_form(n, omega, gamma):
  """lambda_{s_x} = 2i Omega s_x - (2 Gamma/N) s_x^2, each N+1-|s_x| times."""
  out = []
  for s_x in range(-n, n + 1):
    entry = PerturbativeEigenvalue(
      lambda0=2j * omega * s_x,
      shift1=complex(-(2.0 * gamma / n) * s_x ** 2),
      model_id=ModelId.C, s_x=s_x)
    out.extend([entry] * (n + 1 - abs(s_x)))
  return out


_CLOSED_FORMS = {
  ModelId.BTC: btc_spectrum_closed_form,
  ModelId.A: model_a_spectrum_closed_form,
  ModelId.B: model_b_spectrum_closed_form,
  ModelId.C: model_c_spectrum_closed_form,
}


def closed_form_spectrum(model_id, n, omega, gamma):
  return _CLOSED_FORMS[ModelId(model_id)](n, omega, gamma)


def effective_ld_btc(ss, n, gamma):
  """-(N Gamma / 4)(S_x^2 + S^2): the s_x-preserving part of the BTC L_D."""
  sx_sq = ss.sx @ ss.sx
  return -(n * gamma / 4.0) * (sx_sq + ss.s_squared)


def effective_ld(model_id, ss, n, gamma):
  """s_x-preserving part of L_D for the x-basis models.

  btc: -(N Gamma/4)(S_x^2 + S^2); b: (N Gamma/4)(S_x^2 - S^2);
  c: -(N Gamma/2) S_x^2, which is the full dissipator.
  """
  model_id = ModelId(model_id)
  sx_sq = ss.sx @ ss.sx
  if model_id is ModelId.BTC:
    return effective_ld_btc(ss, n, gamma)
  if model_id is ModelId.B:
    return (n * gamma / 4.0) * (sx_sq - ss.s_squared)
  if model_id is ModelId.C:
    return -(n * gamma / 2.0) * sx_sq
  raise InvalidArgumentError(
    "Model a has no superspin form; its perturbation is triangular in the "
    "product basis.")


def effective_form_deviation(liouvillian, effective, basis=None):
  """Largest entry of V^H (L_D - L_eff) V over every s_x sector.

  V holds the coupled-basis vectors of one sector, so this compares the
  projected dissipator with the effective form block by block.
  """
  if basis is None:
    basis = build_coupled_basis(build_superspin(liouvillian.ops))
  ld = np.asarray(liouvillian.ld)
  eff = np.asarray(effective)
  sectors = np.array([s_x for _, s_x in basis.labels])
  worst = 0.0
  for s_x in np.unique(sectors):
    v = basis.vectors[:, sectors == s_x]
    diff = v.conj().T @ (ld - eff) @ v
    worst = max(worst, float(np.abs(diff).max()))
  return worst


def _sectors(l0, omega):
  off = l0 - np.diag(np.diag(l0))
  if np.abs(off).max(initial=0.0) > cfg_pt.offdiagonal_l0_tol:
    raise InvalidArgumentError(
      "L0 is not diagonal in the working basis; assemble the model in the "
      "eigenbasis of its Hamiltonian axis.")
  ratio = np.diag(l0).imag / (2.0 * omega)
  sectors = np.rint(ratio).astype(int)
  drift = np.abs(ratio - sectors).max(initial=0.0)
  if drift > cfg_pt.sector_tol or np.abs(np.diag(l0).real).max() > cfg_pt.sector_tol:
    raise InvalidArgumentError(
      f"L0 eigenvalues are not integer multiples of 2i*omega "
      f"(deviation {drift:.3e}); check omega.")
  return sectors


def _is_normal(block):
  scale = max(np.abs(block).max(initial=0.0), 1e-300) ** 2
  defect = np.abs(block @ block.conj().T - block.conj().T @ block).max(
    initial=0.0)
  return defect <= cfg_pt.normal_rtol * scale * block.shape[0]


def _coupled_block(block, s2_block, s_x, n):
  """(shift, s) pairs for a normal sector block."""
  values, w = scipy.linalg.eigh(0.5 * (s2_block + s2_block.conj().T))
  s_labels = np.array([int(np.rint(superspin_quantum_number(v, n)))
                       for v in values])
  shifts = []
  invariant = True
  for s in np.unique(s_labels):
    w_s = w[:, s_labels == s]
    reduced = w_s.conj().T @ block @ w_s
    if np.linalg.norm(block @ w_s - w_s @ reduced) > \
        cfg_pt.invariant_subspace_tol * max(1.0, np.linalg.norm(block)):
      invariant = False
      break
    shifts.extend((value, int(s)) for value in eig(reduced).values)
  if invariant:
    return shifts

  logging.debug("Sector s_x=%d does not commute with S^2; labeling by <S^2>.",
                s_x)
  result = eig(block, want_vectors=True)
  shifts = []
  for value, v in zip(result.values, result.vectors.T):
    expectation = np.real(v.conj() @ s2_block @ v) / np.real(v.conj() @ v)
    s_cont = superspin_quantum_number(expectation, n)
    if abs(s_cont - np.rint(s_cont)) > cfg_pt.label_threshold:
      logging.warning("Ambiguous superspin label s=%.3f in sector s_x=%d.",
                      s_cont, s_x)
      shifts.append((value, None))
    else:
      shifts.append((value, int(np.rint(s_cont))))
  return shifts


def _product_block(block, labels):
  """(shift, (m, m')) pairs read from the Schur diagonal of a sector block."""
  values = eig(block).values
  diagonal = np.diag(block)
  rows, cols = linear_sum_assignment(
    np.abs(values[:, None] - diagonal[None, :]))
  return [(values[r], labels[c]) for r, c in zip(rows, cols)]


def first_order_spectrum_generic(liouvillian, omega):
  """First-order eigenvalues of any Liouvillian whose L0 is diagonal.

  Sector blocks of L_D that are all normal are labeled in the coupled basis
  (s, s_x); if any block is non-normal, as for the triangular blocks of
  model A, every eigenvalue is labeled by its product state (m, m').
  """
  if not omega > 0:
    raise InvalidArgumentError(f"omega must be positive, got {omega}.")
  l0 = np.asarray(liouvillian.l0)
  ld = np.asarray(liouvillian.ld)
  ops = liouvillian.ops
  n = ops.n_spins
  model_id = liouvillian.model.model_id if liouvillian.model else None
  sectors = _sectors(l0, omega)
  blocks = {s_x: np.flatnonzero(sectors == s_x) for s_x in np.unique(sectors)}
  coupled = all(_is_normal(ld[np.ix_(idx, idx)]) for idx in blocks.values())

  out = []
  if coupled:
    s2 = np.asarray(build_superspin(ops).s_squared)
    for s_x, idx in sorted(blocks.items(), reverse=True):
      sub = np.ix_(idx, idx)
      for shift, s in _coupled_block(ld[sub], s2[sub], s_x, n):
        out.append(PerturbativeEigenvalue(
          lambda0=2j * omega * int(s_x), shift1=complex(shift),
          model_id=model_id, s=s, s_x=int(s_x)))
  else:
    labels = superket_labels(n)
    for s_x, idx in sorted(blocks.items(), reverse=True):
      block_labels = [labels[i] for i in idx]
      for shift, (m, m_prime) in _product_block(ld[np.ix_(idx, idx)],
                                                block_labels):
        out.append(PerturbativeEigenvalue(
          lambda0=2j * omega * int(s_x), shift1=complex(shift),
          model_id=model_id, s_x=int(s_x), m=m, m_prime=m_prime))
  return out
