# src/polarorder/core/errors.py


class PolarOrderError(Exception):
    """Base class for all errors raised by polarorder."""


class ChannelValidationError(PolarOrderError, ValueError):
    """A channel's transition rows are not a valid B-DMC."""


class KernelValidationError(PolarOrderError, ValueError):
    """A kernel's rows are not probability distributions."""


class DistributionValidationError(PolarOrderError, ValueError):
    """Atoms do not form a probability distribution on [-1, 1]."""


class FunctionalValidationError(PolarOrderError, ValueError):
    """A functional is not convex, nondecreasing, or misses phi(0)=0, phi(1)=1."""


class LabelMismatchError(PolarOrderError, ValueError):
    """Kernel input labels do not match the channel output labels."""


class ParameterMismatchError(PolarOrderError, ValueError):
    """Two information sets were built with different (n, phi, eps)."""


class SignSequenceError(PolarOrderError, ValueError):
    """A sign sequence contains something other than '+' and '-'."""


class AlphabetOverflowError(PolarOrderError, RuntimeError):
    """A channel-level transform would exceed the output-alphabet cap."""


class SupportOverflowError(PolarOrderError, RuntimeError):
    """A distribution-level transform would exceed the atom cap."""

    def __init__(self, message: str, atoms: int, cap: int):
        super().__init__(message)
        self.atoms = atoms
        self.cap = cap


class SolverIterationLimitError(PolarOrderError, RuntimeError):
    """The feasibility solver hit its iteration cap before deciding."""
