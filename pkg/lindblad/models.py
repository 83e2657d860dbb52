"""Catalog of the dissipative collective-spin models.

Every model has H = -N Omega J_axis and a single jump operator with rate
N Gamma:

  btc  H along x, jump J_-
  a    H along z, jump J_+
  b    H along x, jump J_z
  c    H along x, jump J_x   (pure dephasing)
"""

import dataclasses
import enum

from absl import logging

from .collective_spin import Axis, axis_operator, build_spin_ops
from .errors import InvalidArgumentError
from .superop import Liouvillian, build_ld, build_l0


class ModelId(enum.Enum):
  BTC = "btc"
  A = "a"
  B = "b"
  C = "c"


class JumpKind(enum.Enum):
  J_MINUS = "j_minus"
  J_PLUS = "j_plus"
  J_Z = "j_z"
  J_X = "j_x"


MODEL_CATALOG = {
  ModelId.BTC: (Axis.X, JumpKind.J_MINUS),
  ModelId.A: (Axis.Z, JumpKind.J_PLUS),
  ModelId.B: (Axis.X, JumpKind.J_Z),
  ModelId.C: (Axis.X, JumpKind.J_X),
}


@dataclasses.dataclass(frozen=True)
class ModelSpec:
  """One of the catalog models at a given size and coupling.

  Args:
    model_id (ModelId): Catalog entry.
    n_spins (int): Number of spins N.
    omega (float): Drive coefficient Omega_x (or Omega_z for model A).
    gamma (float): Dissipation coefficient Gamma; the jump rate is N Gamma.
    hamiltonian_axis (Axis): Axis of H, also the working basis.
    jump_kind (JumpKind): The single Lindblad jump operator.
  """
  model_id: ModelId
  n_spins: int
  omega: float
  gamma: float
  hamiltonian_axis: Axis
  jump_kind: JumpKind

  def __post_init__(self):
    expected = MODEL_CATALOG[self.model_id]
    if (self.hamiltonian_axis, self.jump_kind) != expected:
      raise InvalidArgumentError(
        f"Model {self.model_id.value} needs axis {expected[0].value} and jump "
        f"{expected[1].value}, got {self.hamiltonian_axis.value} and "
        f"{self.jump_kind.value}.")
    if isinstance(self.n_spins, bool) or int(self.n_spins) != self.n_spins \
        or self.n_spins < 1:
      raise InvalidArgumentError(
        f"Model needs at least one spin, got n_spins={self.n_spins}.")
    if not self.gamma >= 0:
      raise InvalidArgumentError(f"Gamma must be non-negative, got {self.gamma}.")
    if self.omega != self.omega:
      raise InvalidArgumentError("Omega must be a real number.")

  @classmethod
  def for_model(cls, model_id, n_spins, omega, gamma):
    model_id = ModelId(model_id)
    axis, jump = MODEL_CATALOG[model_id]
    return cls(model_id=model_id, n_spins=int(n_spins), omega=float(omega),
               gamma=float(gamma), hamiltonian_axis=axis, jump_kind=jump)

  def with_gamma(self, gamma):
    return dataclasses.replace(self, gamma=float(gamma))

  @property
  def rate(self):
    return self.n_spins * self.gamma


def hamiltonian(spec, ops):
  axis = axis_operator(ops, spec.hamiltonian_axis)
  return -spec.n_spins * spec.omega * axis


def jump_operator(spec, ops):
  j_plus, j_minus = ops.standard_ladder()
  return {
    JumpKind.J_MINUS: j_minus,
    JumpKind.J_PLUS: j_plus,
    JumpKind.J_Z: ops.jz,
    JumpKind.J_X: ops.jx,
  }[spec.jump_kind]


def assemble(spec):
  """Builds the Liouvillian of `spec` in the eigenbasis of its Hamiltonian axis."""
  ops = build_spin_ops(spec.n_spins, spec.hamiltonian_axis)
  l0 = build_l0(hamiltonian(spec, ops))
  ld = build_ld([jump_operator(spec, ops)], [spec.rate])
  logging.debug("Assembled model %s: N=%d, omega=%g, gamma=%g, dim=%d",
                spec.model_id.value, spec.n_spins, spec.omega, spec.gamma,
                ops.dim ** 2)
  return Liouvillian(l0=l0, ld=ld, model=spec, ops=ops)
