class ConfigSpin:
  hermitian_tol = 1e-12
  commutator_tol = 1e-12


class ConfigSuperop:
  hermitian_input_tol = 1e-10
  s_squared_self_check_tol = 1e-11
  coupled_residual_tol = 1e-8
  # Relative grouping tolerance for degenerate S^2 eigenvalues.
  s_squared_group_rtol = 1e-6


class ConfigEigensolve:
  # Pairs whose residual exceeds residual_rtol * ||M|| are flagged defective.
  residual_rtol = 1e-8
  # Pivot floor used by the triangular back-substitution at repeated eigenvalues.
  pivot_floor = 1e-14
  # Eigenvalues are ordered on keys rounded to this many decimals.
  sort_decimals = 9


class ConfigPerturbation:
  # |Im(lambda0) / (2 omega) - round(.)| must stay below this.
  sector_tol = 1e-9
  offdiagonal_l0_tol = 1e-10
  # Quantum-number distance beyond which an s label is dropped.
  label_threshold = 0.3
  # ||[B, B^dagger]|| <= normal_rtol * ||B||^2 marks a block as normal.
  normal_rtol = 1e-8
  invariant_subspace_tol = 1e-9


class ConfigDynamics:
  default_dt = 1e-3
  sample_dt = 1e-2
  # dt * N * (Gamma + |Omega|): warn above the first, refuse above the second.
  stability_warn = 0.1
  stability_limit = 1.0
  trace_drift_limit = 1e-6
  state_tol = 1e-10


class ConfigAnalysis:
  zero_tol = 1e-8
  real_tol = 1e-8


class ConfigSweep:
  ep_threshold = 1e-6
  # Relative bracket width at which Gamma* bisection stops.
  bisection_rtol = 1e-4
  max_bisection_steps = 60
  continuation_factor = 3.0
  threads_env = "SUPERSPIN_THREADS"


class ConfigOutput:
  float_format = "%.12g"
  svg_hashsalt = "superspin"


class ConfigCli:
  n = 3
  omega = 1.0
  gamma = 0.1
  gamma_min = 0.1
  gamma_max = 2.0
  steps = 41
  t_max = 20.0
  density_n = 10
  n_min = 1
  n_max = 10
