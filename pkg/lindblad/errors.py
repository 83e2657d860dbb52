"""Exceptions raised by the lindblad package."""


class SuperspinError(Exception):
  """Base class for every error raised by this package."""


class InvalidArgumentError(SuperspinError, ValueError):
  """An argument is outside the domain an operation accepts."""


class NumericalFailureError(SuperspinError, RuntimeError):
  """A numerical procedure did not reach its accuracy target.

  Args:
    message (str): Human readable description.
    index (int, optional): Offending eigenvalue index or time step.
  """

  def __init__(self, message, index=None):
    super().__init__(message)
    self.index = index
