import csv
import json
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from config import ConfigOutput as cfg_out

plt.rcParams["svg.hashsalt"] = cfg_out.svg_hashsalt


def format_float(x):
  """Formats a float with the fixed output precision; -0 prints as 0."""
  x = float(x)
  if x == 0.0:
    x = 0.0
  return cfg_out.float_format % x


def format_label(q):
  """Quantum numbers: '' when absent, '2' for integers, '1.5' for halves."""
  if q is None:
    return ""
  return format_float(q)


def ensure_parent(path):
  parent = os.path.dirname(os.path.abspath(path))
  os.makedirs(parent, exist_ok=True)


def write_csv(path, header, rows):
  """Writes rows of preformatted strings; stdout if path is None."""
  if path is None:
    _write_rows(sys.stdout, header, rows)
    return
  ensure_parent(path)
  with open(path, "w", newline="", encoding="utf-8") as f:
    _write_rows(f, header, rows)


def _write_rows(stream, header, rows):
  writer = csv.writer(stream, lineterminator="\n")
  writer.writerow(header)
  writer.writerows(rows)


def read_csv(path):
  """Reads a CSV file back as a list of dicts keyed by the header."""
  with open(path, newline="", encoding="utf-8") as f:
    return list(csv.DictReader(f))


def write_json(path, header, rows):
  """Writes the same rows as write_csv as a JSON list of objects."""
  ensure_parent(path)
  records = [dict(zip(header, row)) for row in rows]
  with open(path, "w", encoding="utf-8") as f:
    json.dump({"columns": list(header), "rows": records}, f, indent=2)
    f.write("\n")


def _save(fig, path):
  ensure_parent(path)
  fig.savefig(path, format="svg", metadata={"Date": None})
  plt.close(fig)


def plot_spectrum(path, exact=None, perturbative=None, title=None):
  """Complex-plane scatter: exact as circles, perturbative as crosses."""
  fig, ax = plt.subplots(figsize=(5, 4))
  if exact is not None:
    exact = np.asarray(exact)
    ax.scatter(exact.real, exact.imag, s=30, facecolors="none",
               edgecolors="tab:red", label="exact")
  if perturbative is not None:
    perturbative = np.asarray(perturbative)
    ax.scatter(perturbative.real, perturbative.imag, s=20, marker="x",
               color="black", label="first order")
  ax.set_xlabel(r"Re $\lambda$")
  ax.set_ylabel(r"Im $\lambda$")
  if title:
    ax.set_title(title)
  ax.legend(loc="best")
  fig.tight_layout()
  _save(fig, path)


def plot_sweep(path, sweep):
  """Imaginary parts against Gamma with the EP events marked."""
  fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(9, 4))
  for gamma, values in zip(sweep.gammas, sweep.spectra):
    ax_re.plot(np.full(len(values), gamma), values.real, ",", color="tab:blue")
    ax_im.plot(np.full(len(values), gamma), values.imag, ",", color="tab:blue")
  for event in sweep.ep_events:
    ax_im.axvline(event.gamma_star, color="tab:red", lw=0.5)
  ax_re.set_xlabel(r"$\Gamma$")
  ax_re.set_ylabel(r"Re $\lambda$")
  ax_im.set_xlabel(r"$\Gamma$")
  ax_im.set_ylabel(r"Im $\lambda$")
  fig.tight_layout()
  _save(fig, path)


def plot_dynamics(path, series):
  """<J_z>(t): integrated series as circles, analytic ones as lines."""
  fig, ax = plt.subplots(figsize=(6, 3.5))
  for s in series:
    if s.provenance.value == "integrated":
      stride = max(1, len(s.times) // 200)
      ax.plot(s.times[::stride], s.jz[::stride], "o", ms=3, mfc="none",
              color="tab:red", label="integrated")
    else:
      ax.plot(s.times, s.jz, "-", color="tab:blue", label="analytic")
  ax.set_xlabel("t")
  ax.set_ylabel(r"$\langle J_z \rangle$")
  ax.legend(loc="best")
  fig.tight_layout()
  _save(fig, path)


def plot_density(path, rows, gamma):
  """Sector density g against its continuous position."""
  fig, ax = plt.subplots(figsize=(5, 3.5))
  position = np.array([r.position for r in rows])
  ax.plot(position, [r.g for r in rows], "o", color="tab:red", label="1/d")
  grid = np.linspace(position.min(), position.max(), 200)
  scale = rows[0].g * rows[0].position
  ax.plot(grid, scale / grid, "-", color="tab:blue",
          label=rf"continuum, $\Gamma$={gamma:g}")
  ax.set_xlabel("sector position")
  ax.set_ylabel("g")
  ax.legend(loc="best")
  fig.tight_layout()
  _save(fig, path)
