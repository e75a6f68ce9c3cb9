"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: precondition-type failures exit 3,
convergence failures exit 4.
"""


class TDHSimError(Exception):
    """Base class for all package errors."""


class DomainError(TDHSimError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ContractError(TDHSimError, ValueError):
    """An input violates a structural contract (Hermitian, unitary, ...)."""


class SizingError(TDHSimError, ValueError):
    """A dense object would exceed the desk-scale dimension cap."""


class DimensionError(TDHSimError, ValueError):
    """Operands have incompatible dimensions."""


class ParityError(TDHSimError, ValueError):
    """A polynomial lacks the definite parity an operation requires."""


class ModelError(TDHSimError, ValueError):
    """A Hamiltonian model fails one of its construction invariants."""


class CommutativityError(ModelError):
    """The Hamiltonian does not commute with itself at different times."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceError(TDHSimError, RuntimeError):
    """An iterative solver or degree search failed to reach its tolerance."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual
