# ==============================================================================
# MIT License

# Copyright (c) 2025 The Superspin Authors

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.
# ==============================================================================

"""
Liouvillian spectra and magnetization dynamics of dissipative collective spins.

Builds the vectorized Liouvillian of one of four catalog models (the boundary
time crystal 'btc' and models 'a', 'b', 'c'), compares its exact spectrum with
the first-order superspin closed forms, sweeps the dissipation strength to
locate exceptional points, integrates the master equation, and tabulates the
sector densities. Every command writes CSV (stdout without --out) and can add a
JSON copy and an SVG figure.
"""

import argparse
import dataclasses
import os
import sys
from typing import Optional

import numpy as np
from absl import app
from absl import logging
from absl.flags import argparse_flags

import utils
from config import ConfigCli as cfg_cli
from config import ConfigDynamics as cfg_dyn
from config import ConfigSweep as cfg_sweep
from lindblad import analysis
from lindblad import dynamics
from lindblad import perturbation
from lindblad.errors import InvalidArgumentError, NumericalFailureError
from lindblad.models import ModelId, ModelSpec

COMMANDS = ("spectrum", "sweep", "dynamics", "density", "gap")
METHODS = ("exact", "perturbative", "both")

SPECTRUM_HEADER = ("method", "re", "im", "s", "sx", "m", "mp")
SWEEP_HEADER = ("gamma", "track", "re", "im")
EVENT_HEADER = ("pair_id", "gamma_star", "confidence", "re", "bracket_lo",
                "bracket_hi")
DYNAMICS_HEADER = ("t", "jx", "jy", "jz", "provenance")
DENSITY_HEADER = ("s_or_sx", "d", "g", "s_bar")
GAP_HEADER = ("n", "closed_form_gap", "exact_gap")


@dataclasses.dataclass(frozen=True)
class RunConfig:
  """Validated settings of one CLI invocation."""
  command: str
  model_id: ModelId
  n: int = cfg_cli.n
  omega: float = cfg_cli.omega
  gamma: float = cfg_cli.gamma
  gamma_min: float = cfg_cli.gamma_min
  gamma_max: float = cfg_cli.gamma_max
  steps: int = cfg_cli.steps
  method: str = "both"
  t_max: float = cfg_cli.t_max
  dt: float = cfg_dyn.default_dt
  sample_dt: float = cfg_dyn.sample_dt
  init: str = dynamics.StateKind.POLARIZED_Z.value
  analytic: bool = False
  detect_ep: bool = False
  ep_threshold: float = cfg_sweep.ep_threshold
  n_min: int = cfg_cli.n_min
  n_max: int = cfg_cli.n_max
  out: Optional[str] = None
  json: Optional[str] = None
  svg: Optional[str] = None
  ep_out: Optional[str] = None

  @classmethod
  def from_args(cls, args):
    fields = {f.name for f in dataclasses.fields(cls)}
    values = {k: v for k, v in vars(args).items()
              if k in fields and v is not None}
    values["model_id"] = ModelId(args.model)
    config = cls(**values)
    config.validate()
    return config

  def validate(self):
    if self.command not in COMMANDS:
      raise InvalidArgumentError(f"Unknown command {self.command!r}.")
    if self.n < 1:
      raise InvalidArgumentError(f"--n must be at least 1, got {self.n}.")
    if self.steps < 2:
      raise InvalidArgumentError(f"--steps must be at least 2, got {self.steps}.")
    if not self.gamma >= 0:
      raise InvalidArgumentError(
        f"--gamma must be non-negative, got {self.gamma}.")
    if not self.gamma_min >= 0:
      raise InvalidArgumentError(
        f"--gamma-min must be non-negative, got {self.gamma_min}.")
    if not self.t_max > 0:
      raise InvalidArgumentError(f"--t-max must be positive, got {self.t_max}.")
    if self.method not in METHODS:
      raise InvalidArgumentError(f"Unknown method {self.method!r}.")
    if not 1 <= self.n_min <= self.n_max:
      raise InvalidArgumentError(
        f"Need 1 <= --n-min <= --n-max, got {self.n_min}, {self.n_max}.")
    for path, suffix, flag in ((self.out, ".csv", "--out"),
                               (self.ep_out, ".csv", "--ep-out"),
                               (self.json, ".json", "--json"),
                               (self.svg, ".svg", "--svg")):
      if path is not None and not path.lower().endswith(suffix):
        raise InvalidArgumentError(
          f"{flag} expects a {suffix} file, got {path!r}.")

  def spec(self, gamma=None, n=None):
    return ModelSpec.for_model(self.model_id, self.n if n is None else n,
                               self.omega,
                               self.gamma if gamma is None else gamma)


def _emit(cfg, header, rows):
  utils.write_csv(cfg.out, header, rows)
  if cfg.out:
    logging.info("Wrote %d rows to %s", len(rows), cfg.out)
  if cfg.json:
    utils.write_json(cfg.json, header, rows)
    logging.info("Wrote %s", cfg.json)


def _sorted(values):
  return np.lexsort((np.round(values.imag, 9), -np.round(values.real, 9)))


def _exact_rows(values):
  f = utils.format_float
  return [("exact", f(v.real), f(v.imag), "", "", "", "") for v in values]


def _perturbative_rows(eigenvalues):
  f, q = utils.format_float, utils.format_label
  values = perturbation.values_of(eigenvalues)
  rows = []
  for k in _sorted(values):
    e = eigenvalues[k]
    s_x = None if e.m is not None else e.s_x
    rows.append(("perturbative", f(values[k].real), f(values[k].imag),
                 q(e.s), q(s_x), q(e.m), q(e.m_prime)))
  return rows


def spectrum(cfg):
  """Exact and/or closed-form first-order spectrum at one Gamma."""
  rows = []
  exact = closed = None
  if cfg.method in ("exact", "both"):
    exact = analysis.exact_spectrum(cfg.spec())
    rows += _exact_rows(exact)
  if cfg.method in ("perturbative", "both"):
    eigenvalues = perturbation.closed_form_spectrum(
      cfg.model_id, cfg.n, cfg.omega, cfg.gamma)
    closed = perturbation.values_of(eigenvalues)
    rows += _perturbative_rows(eigenvalues)
  if exact is not None and closed is not None:
    match = analysis.match_spectra(exact, closed)
    logging.info("Exact vs first order: max distance %.3e, mean %.3e",
                 match.max_distance, match.mean_distance)
  _emit(cfg, SPECTRUM_HEADER, rows)
  if cfg.svg:
    utils.plot_spectrum(cfg.svg, exact, closed,
                        title=f"model {cfg.model_id.value}, N={cfg.n}, "
                              f"$\\Gamma$={cfg.gamma:g}")


def sweep(cfg):
  """Exact spectra over a Gamma grid, optionally with EP events."""
  result = analysis.sweep_gamma(cfg.spec(gamma=cfg.gamma_min), cfg.gamma_min,
                                cfg.gamma_max, cfg.steps, cfg.ep_threshold,
                                detect_ep=cfg.detect_ep)
  f = utils.format_float
  rows = []
  for gamma, values, track in zip(result.gammas, result.spectra,
                                  result.tracks):
    for k, v in enumerate(values[track]):
      rows.append((f(gamma), str(k), f(v.real), f(v.imag)))
  _emit(cfg, SWEEP_HEADER, rows)

  if cfg.detect_ep:
    ep_out = cfg.ep_out
    if ep_out is None:
      folder = os.path.dirname(cfg.out) if cfg.out else ""
      ep_out = os.path.join(folder, "ep_events.csv")
    events = [(str(e.pair_id), f(e.gamma_star), e.confidence.value,
               f(e.re_at_event), f(e.bracket[0]), f(e.bracket[1]))
              for e in result.ep_events]
    utils.write_csv(ep_out, EVENT_HEADER, events)
    logging.info("Wrote %d EP events to %s", len(events), ep_out)
  if cfg.svg:
    utils.plot_sweep(cfg.svg, result)


def dynamics_cmd(cfg):
  """Integrated (and optionally analytic) magnetization from a pure state."""
  spec = cfg.spec()
  rho0 = dynamics.prepare_state(cfg.init, cfg.n)
  integrated = dynamics.integrate_master_equation(
    spec, rho0, cfg.t_max, cfg.dt, cfg.sample_dt)
  series = [integrated]
  if cfg.analytic:
    if cfg.model_id not in (ModelId.B, ModelId.C):
      raise InvalidArgumentError(
        f"--analytic is available for models b and c, not "
        f"{cfg.model_id.value}.")
    init = dynamics.InitialState.from_density(rho0)
    analytic = dynamics.analytic_jz(cfg.model_id, cfg.n, cfg.omega, cfg.gamma,
                                    init, integrated.times)
    logging.info("max |delta jz| between integrated and analytic: %.3e",
                 integrated.max_deviation(analytic))
    series.append(analytic)

  f = utils.format_float
  rows = [(f(t), f(x), f(y), f(z), s.provenance.value)
          for s in series for t, x, y, z in zip(s.times, s.jx, s.jy, s.jz)]
  _emit(cfg, DYNAMICS_HEADER, rows)
  if cfg.svg:
    utils.plot_dynamics(cfg.svg, series)


def density(cfg):
  """Neighbouring-sector distances d and densities g from the closed forms."""
  table = analysis.sector_distance_and_density(cfg.model_id, cfg.n, cfg.gamma)
  f = utils.format_float
  rows = [(str(r.label), f(r.d), f(r.g), f(r.position)) for r in table]
  _emit(cfg, DENSITY_HEADER, rows)
  if cfg.svg:
    utils.plot_density(cfg.svg, table, cfg.gamma)


def gap(cfg):
  """Closed-form and exact Liouvillian gaps across N."""
  f = utils.format_float
  rows = []
  for row in analysis.gap_scan(cfg.model_id, range(cfg.n_min, cfg.n_max + 1),
                               cfg.omega, cfg.gamma):
    rows.append((str(row.n), f(row.closed_form.gap), f(row.exact.gap)))
  _emit(cfg, GAP_HEADER, rows)


HANDLERS = {
  "spectrum": spectrum,
  "sweep": sweep,
  "dynamics": dynamics_cmd,
  "density": density,
  "gap": gap,
}


def _model_args(n_default):
  parent = argparse.ArgumentParser(add_help=False)
  parent.add_argument(
    "--model", choices=[m.value for m in ModelId], default=ModelId.BTC.value,
    help="Catalog model: 'btc' (H along x, jump J_-), 'a' (H along z, jump "
         "J_+), 'b' (H along x, jump J_z) or 'c' (H along x, jump J_x).")
  parent.add_argument(
    "--n", type=int, default=n_default,
    help="Number of spins N.")
  parent.add_argument(
    "--omega", type=float, default=cfg_cli.omega,
    help="Drive strength Omega.")
  parent.add_argument(
    "--out", type=str, default=None,
    help="Output CSV file. Written to stdout if omitted.")
  parent.add_argument(
    "--json", type=str, default=None,
    help="Optional JSON copy of the CSV rows.")
  parent.add_argument(
    "--svg", type=str, default=None,
    help="Optional SVG figure.")
  return parent


def parse_args(argv):
  """Parses command line arguments."""
  # absl adds --no<flag> forms, so prefixes such as --n are ambiguous.
  parser = argparse_flags.ArgumentParser(
    formatter_class=argparse.ArgumentDefaultsHelpFormatter, allow_abbrev=False)
  subparsers = parser.add_subparsers(
    title="commands", dest="command",
    help="What to do: 'spectrum' compares exact and first-order eigenvalues, "
         "'sweep' scans Gamma and locates exceptional points, 'dynamics' "
         "integrates the master equation, 'density' tabulates sector "
         "densities and 'gap' scans the Liouvillian gap over N. Invoke "
         "'<command> -h' for more information.")
  common = _model_args(cfg_cli.n)

  spectrum_cmd = subparsers.add_parser(
    "spectrum", parents=[common],
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    description="Computes the exact Liouvillian spectrum and/or the "
                "closed-form first-order spectrum at a single Gamma.")
  spectrum_cmd.add_argument(
    "--gamma", type=float, default=cfg_cli.gamma,
    help="Dissipation strength Gamma.")
  spectrum_cmd.add_argument(
    "--method", choices=METHODS, default="both",
    help="Which spectra to emit.")

  sweep_cmd = subparsers.add_parser(
    "sweep", parents=[common],
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    description="Computes exact spectra on a uniform Gamma grid and tracks "
                "conjugate pairs until they merge on the real axis.")
  sweep_cmd.add_argument(
    "--gamma-min", type=float, default=cfg_cli.gamma_min, dest="gamma_min",
    help="First grid point.")
  sweep_cmd.add_argument(
    "--gamma-max", type=float, default=cfg_cli.gamma_max, dest="gamma_max",
    help="Last grid point.")
  sweep_cmd.add_argument(
    "--steps", type=int, default=cfg_cli.steps,
    help="Number of grid points.")
  sweep_cmd.add_argument(
    "--detect-ep", action="store_true", dest="detect_ep",
    help="Locate exceptional points and write them to the events CSV.")
  sweep_cmd.add_argument(
    "--ep-threshold", type=float, default=cfg_sweep.ep_threshold,
    dest="ep_threshold",
    help="A pair whose |Im| falls to this value has merged.")
  sweep_cmd.add_argument(
    "--ep-out", type=str, default=None, dest="ep_out",
    help="EP events CSV. Defaults to ep_events.csv next to --out.")

  dynamics_parser = subparsers.add_parser(
    "dynamics", parents=[common],
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    description="Integrates the master equation with fixed-step RK4 and "
                "samples the magnetization.")
  dynamics_parser.add_argument(
    "--gamma", type=float, default=cfg_cli.gamma,
    help="Dissipation strength Gamma.")
  dynamics_parser.add_argument(
    "--t-max", type=float, default=cfg_cli.t_max, dest="t_max",
    help="Final time.")
  dynamics_parser.add_argument(
    "--dt", type=float, default=cfg_dyn.default_dt,
    help="RK4 step.")
  dynamics_parser.add_argument(
    "--sample-dt", type=float, default=cfg_dyn.sample_dt, dest="sample_dt",
    help="Spacing of the output samples.")
  dynamics_parser.add_argument(
    "--init", choices=[k.value for k in dynamics.StateKind],
    default=dynamics.StateKind.POLARIZED_Z.value,
    help="Initial pure state.")
  dynamics_parser.add_argument(
    "--analytic", action="store_true",
    help="Also emit the Ehrenfest closed form (models b and c).")

  density_cmd = subparsers.add_parser(
    "density", parents=[_model_args(cfg_cli.density_n)],
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    description="Tabulates the distance between neighbouring sectors and "
                "the sector density.")
  density_cmd.add_argument(
    "--gamma", type=float, default=cfg_cli.gamma,
    help="Dissipation strength Gamma.")

  gap_cmd = subparsers.add_parser(
    "gap", parents=[common],
    formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    description="Closed-form and exact Liouvillian gap for a range of N.")
  gap_cmd.add_argument(
    "--gamma", type=float, default=cfg_cli.gamma,
    help="Dissipation strength Gamma.")
  gap_cmd.add_argument(
    "--n-min", type=int, default=cfg_cli.n_min, dest="n_min",
    help="Smallest N.")
  gap_cmd.add_argument(
    "--n-max", type=int, default=cfg_cli.n_max, dest="n_max",
    help="Largest N.")

  # Parse arguments.
  args = parser.parse_args(argv[1:])
  if args.command is None:
    parser.print_usage()
    sys.exit(2)
  return args


def main(args):
  try:
    cfg = RunConfig.from_args(args)
    logging.info("Running %s for model %s", cfg.command, cfg.model_id.value)
    HANDLERS[cfg.command](cfg)
  except InvalidArgumentError as e:
    logging.error("Invalid argument: %s", e)
    return 2
  except NumericalFailureError as e:
    logging.error("Numerical failure: %s", e)
    return 3
  return 0


if __name__ == "__main__":
  app.run(main, flags_parser=parse_args)
