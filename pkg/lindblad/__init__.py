from .errors import InvalidArgumentError, NumericalFailureError, SuperspinError
from .collective_spin import (Axis, SpinOperatorSet, axis_operator, build_spin_ops,
                              commutator, ladder_product_identity_check)
from .superop import (CoupledBasis, Liouvillian, SuperspinSet, SuperVector,
                      build_coupled_basis, build_l0, build_ld, build_superspin,
                      devectorize, superket_labels, vectorize)
from .models import JumpKind, ModelId, ModelSpec, assemble
from .eigensolve import EigenResult, eig, schur
from .perturbation import (PerturbativeEigenvalue, closed_form_spectrum,
                           effective_form_deviation, effective_ld,
                           effective_ld_btc, first_order_spectrum_generic,
                           values_of)
from .dynamics import (InitialState, Provenance, StateKind, TimeSeries,
                       analytic_jz, ehrenfest_eigenstructure, evolve_ehrenfest,
                       integrate_master_equation, prepare_state)
from .analysis import (Confidence, DensityRow, EPEvent, GapResult,
                       SpectrumMatch, SweepResult, count_real, exact_spectrum,
                       gap_scan, liouvillian_gap, match_spectra,
                       sector_distance_and_density, sweep_gamma)
