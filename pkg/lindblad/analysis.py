"""Spectral post-processing: gaps, sector densities, matching and Gamma sweeps."""

import concurrent.futures
import dataclasses
import enum
import os
from typing import List, Optional, Tuple

import numpy as np
from absl import logging
from scipy.optimize import linear_sum_assignment

from config import ConfigAnalysis as cfg_an
from config import ConfigSweep as cfg_sweep
from .eigensolve import eig
from .errors import InvalidArgumentError, NumericalFailureError
from .models import ModelId, ModelSpec, assemble
from .perturbation import closed_form_spectrum, values_of


@dataclasses.dataclass(frozen=True)
class GapResult:
  gap: float
  degenerate: bool


def _as_values(spectrum):
  if len(spectrum) and hasattr(spectrum[0], "value"):
    return values_of(spectrum)
  return np.asarray(spectrum, dtype=np.complex128)


def liouvillian_gap(spectrum):
  """Smallest nonzero |Re lambda|, or 0 with the flag for several steady states."""
  values = _as_values(spectrum)
  if values.size == 0:
    raise InvalidArgumentError("Cannot take the gap of an empty spectrum.")
  zeros = np.abs(values) < cfg_an.zero_tol
  if not zeros.any():
    raise InvalidArgumentError(
      f"Spectrum has no steady state (smallest |lambda| is "
      f"{np.abs(values).min():.3e}).")
  if zeros.sum() > 1:
    return GapResult(gap=0.0, degenerate=True)
  decay = np.abs(values.real)
  decay = decay[decay > cfg_an.zero_tol]
  return GapResult(gap=float(decay.min()) if decay.size else 0.0,
                   degenerate=False)


def exact_spectrum(spec):
  return eig(assemble(spec).total).values


@dataclasses.dataclass(frozen=True)
class DensityRow:
  """One sector step: integer label, its continuous position, d and g."""
  label: int
  position: float
  d: float
  g: float


def sector_distance_and_density(model_id, n, gamma):
  """Neighbouring-sector distances and their continuum density.

  btc, b: d(s) = |Re lambda_{s,0} - Re lambda_{s-1,0}| = 2 Gamma s/N with
  g = 1/(2 Gamma s_bar) at s_bar = s/N.
  c: d(s_x) = (2 Gamma/N)(2 s_x - 1) over real parts, g = 1/(4 Gamma s_bar_x)
  at the midpoint s_bar_x = (s_x - 1/2)/N.
  """
  model_id = ModelId(model_id)
  if model_id is ModelId.A:
    raise InvalidArgumentError(
      "Model a has a constant gap 2*Gamma and no sector densification.")
  if not gamma > 0:
    raise InvalidArgumentError(f"Gamma must be positive, got {gamma}.")
  spectrum = closed_form_spectrum(model_id, n, 1.0, gamma)
  rows = []
  if model_id is ModelId.C:
    real = {e.s_x: e.value.real for e in spectrum}
    for s_x in range(1, n + 1):
      position = (s_x - 0.5) / n
      rows.append(DensityRow(label=s_x, position=position,
                             d=abs(real[s_x] - real[s_x - 1]),
                             g=1.0 / (4.0 * gamma * position)))
  else:
    real = {e.s: e.value.real for e in spectrum if e.s_x == 0}
    for s in range(1, n + 1):
      position = s / n
      rows.append(DensityRow(label=s, position=position,
                             d=abs(real[s] - real[s - 1]),
                             g=1.0 / (2.0 * gamma * position)))
  for row in rows:
    if not np.isclose(row.d * row.g, 1.0, rtol=1e-12, atol=0.0):
      raise NumericalFailureError(
        f"Sector distance {row.d:.12g} disagrees with density {row.g:.12g} "
        f"at label {row.label}.", index=row.label)
  return rows


@dataclasses.dataclass(frozen=True)
class SpectrumMatch:
  pairs: List[Tuple[complex, complex, float]]
  max_distance: float
  mean_distance: float
  unmatched: int = 0


def match_spectra(exact, perturbative):
  """Minimum-total-distance perfect matching in the complex plane."""
  a = _as_values(exact)
  b = _as_values(perturbative)
  if a.shape != b.shape:
    raise InvalidArgumentError(
      f"Spectra differ in size ({a.size} exact vs {b.size} perturbative).")
  cost = np.abs(a[:, None] - b[None, :])
  rows, cols = linear_sum_assignment(cost)
  distances = cost[rows, cols]
  pairs = [(complex(a[r]), complex(b[c]), float(d))
           for r, c, d in zip(rows, cols, distances)]
  return SpectrumMatch(
    pairs=pairs,
    max_distance=float(distances.max()) if distances.size else 0.0,
    mean_distance=float(distances.mean()) if distances.size else 0.0)


def count_real(values, tol=cfg_an.real_tol):
  return int(np.sum(np.abs(np.imag(_as_values(values))) < tol))


class Confidence(enum.Enum):
  HIGH = "high"
  LOW = "low"


@dataclasses.dataclass(frozen=True)
class EPEvent:
  """A tracked conjugate pair merging onto the real axis.

  Args:
    pair_id (int): Index of the pair among the complex pairs at gamma_min.
    gamma_star (float): Bisection estimate of the merging point.
    confidence (Confidence): LOW if continuation was ambiguous on the track.
    re_at_event (float): Mean real part of the pair at gamma_star.
    im_pair (tuple): |Im| of the upper and lower member at gamma_star.
    bracket (tuple): Grid interval that contains gamma_star.
  """
  pair_id: int
  gamma_star: float
  confidence: Confidence
  re_at_event: float
  im_pair: Tuple[float, float]
  bracket: Tuple[float, float]


@dataclasses.dataclass(frozen=True)
class SweepResult:
  """Spectra on the Gamma grid; tracks[i][k] is track k's index in spectra[i]."""
  gammas: np.ndarray
  spectra: List[np.ndarray]
  tracks: List[np.ndarray]
  ep_events: List[EPEvent]


def worker_count():
  raw = os.environ.get(cfg_sweep.threads_env)
  if raw is None or raw == "":
    return os.cpu_count() or 1
  try:
    value = int(raw)
  except ValueError:
    value = 0
  if value < 1:
    raise InvalidArgumentError(
      f"{cfg_sweep.threads_env} must be a positive integer, got {raw!r}.")
  return value


def _continue(previous, current):
  """Orders `current` to follow `previous`; returns (order, ambiguous mask)."""
  cost = np.abs(previous[:, None] - current[None, :])
  _, cols = linear_sum_assignment(cost)
  motion = cost[np.arange(len(previous)), cols]
  scale = max(np.abs(previous).max(initial=0.0), 1.0)
  radius = cfg_sweep.continuation_factor * np.maximum(motion, 1e-12 * scale)
  rivals = cost <= radius[:, None]
  rivals[np.arange(len(previous)), cols] = False
  # The conjugate partner of the matched value is the same pair, not a rival.
  partner = np.abs(current[None, :] - np.conj(current[cols])[:, None])
  rivals &= partner > radius[:, None]
  return cols, rivals.any(axis=1)


def _pairs(values, threshold):
  """(upper, lower) track indices of the complex-conjugate pairs."""
  upper = np.flatnonzero(values.imag > threshold)
  lower = np.flatnonzero(values.imag < -threshold)
  if len(upper) != len(lower):
    logging.warning("Unbalanced conjugate pairs (%d upper, %d lower).",
                    len(upper), len(lower))
  cost = np.abs(values[upper][:, None] - np.conj(values[lower])[None, :])
  rows, cols = linear_sum_assignment(cost)
  return [(int(upper[r]), int(lower[c])) for r, c in zip(rows, cols)]


def _pair_im(values, pair):
  return abs(values[pair[0]].imag), abs(values[pair[1]].imag)


def _refine(spec, pair, lo, hi, tracked_lo, threshold):
  """Bisects on min |Im| of the pair between grid points lo and hi."""
  for step in range(cfg_sweep.max_bisection_steps):
    if hi - lo <= cfg_sweep.bisection_rtol * hi:
      break
    mid = 0.5 * (lo + hi)
    spectrum = exact_spectrum(spec.with_gamma(mid))
    order, _ = _continue(tracked_lo, spectrum)
    tracked = spectrum[order]
    if min(_pair_im(tracked, pair)) <= threshold:
      hi = mid
    else:
      lo, tracked_lo = mid, tracked
    logging.debug("Bisection step %d: [%.8g, %.8g]", step, lo, hi)
  spectrum = exact_spectrum(spec.with_gamma(hi))
  order, _ = _continue(tracked_lo, spectrum)
  return hi, spectrum[order]


def sweep_gamma(spec, gamma_min, gamma_max, steps,
                ep_threshold=cfg_sweep.ep_threshold, detect_ep=True):
  """Exact spectra on a uniform Gamma grid with exceptional-point tracking.

  Spectra are computed concurrently. Identities are continued between
  neighbouring grid points by Hungarian matching; a pair whose min |Im| falls
  to ep_threshold or below records an event, refined by bisection.
  """
  if not 0 <= gamma_min < gamma_max:
    raise InvalidArgumentError(
      f"Need 0 <= gamma_min < gamma_max, got [{gamma_min}, {gamma_max}].")
  if steps < 2:
    raise InvalidArgumentError(f"Need at least 2 grid points, got {steps}.")
  if not isinstance(spec, ModelSpec):
    raise InvalidArgumentError("sweep_gamma needs a ModelSpec template.")
  gammas = np.linspace(gamma_min, gamma_max, int(steps))
  workers = min(worker_count(), len(gammas))
  logging.info("Sweeping model %s over %d Gamma values with %d workers.",
               spec.model_id.value, len(gammas), workers)
  with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
    spectra = list(pool.map(lambda g: exact_spectrum(spec.with_gamma(g)),
                            gammas))

  tracks = [np.arange(len(spectra[0]))]
  # ambiguous[i] flags tracks whose step from gammas[i-1] to gammas[i] had a
  # rival candidate.
  ambiguous = [np.zeros(len(spectra[0]), dtype=bool)]
  for i in range(1, len(gammas)):
    previous = spectra[i - 1][tracks[-1]]
    order, unsure = _continue(previous, spectra[i])
    tracks.append(order)
    ambiguous.append(unsure)

  events = []
  if detect_ep:
    events = _detect_events(spec, gammas, spectra, tracks, ambiguous,
                            ep_threshold)
  return SweepResult(gammas=gammas, spectra=spectra, tracks=tracks,
                     ep_events=events)


def _detect_events(spec, gammas, spectra, tracks, ambiguous, threshold):
  tracked = [s[t] for s, t in zip(spectra, tracks)]
  pairs = _pairs(tracked[0], threshold)
  events = []
  for pair_id, pair in enumerate(pairs):
    for i in range(1, len(gammas)):
      if min(_pair_im(tracked[i - 1], pair)) > threshold >= \
          min(_pair_im(tracked[i], pair)):
        gamma_star, values = _refine(spec, pair, gammas[i - 1], gammas[i],
                                     tracked[i - 1], threshold)
        confidence = (Confidence.LOW if ambiguous[i][list(pair)].any()
                      else Confidence.HIGH)
        if confidence is Confidence.LOW:
          logging.warning("Pair %d continuation was ambiguous; event at "
                          "Gamma=%.6g is low-confidence.", pair_id, gamma_star)
        events.append(EPEvent(
          pair_id=pair_id, gamma_star=float(gamma_star),
          confidence=confidence,
          re_at_event=float(np.mean(values[list(pair)].real)),
          im_pair=_pair_im(values, pair),
          bracket=(float(gammas[i - 1]), float(gammas[i]))))
        break
  events.sort(key=lambda e: (e.gamma_star, e.pair_id))
  logging.info("Found %d exceptional-point events among %d pairs.",
               len(events), len(pairs))
  return events


@dataclasses.dataclass(frozen=True)
class GapRow:
  n: int
  closed_form: GapResult
  exact: Optional[GapResult]


def gap_scan(model_id, ns, omega, gamma, exact=True):
  """Closed-form and exact Liouvillian gaps for each N in `ns`."""
  rows = []
  for n in ns:
    closed = liouvillian_gap(closed_form_spectrum(model_id, n, omega, gamma))
    measured = None
    if exact:
      measured = liouvillian_gap(exact_spectrum(
        ModelSpec.for_model(model_id, n, omega, gamma)))
    rows.append(GapRow(n=int(n), closed_form=closed, exact=measured))
  return rows
