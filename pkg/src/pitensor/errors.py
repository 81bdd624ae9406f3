"""Exception hierarchy shared by every module of the package."""


class PitensorError(Exception):
    """Base class of all package errors."""


class InputError(PitensorError, ValueError):
    """Malformed or inconsistent input."""


class DimensionMismatch(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class ZeroDirection(InputError):
    pass


class ZeroVector(InputError):
    pass


class NotPolyhedral(InputError):
    pass


class WrongFamily(InputError):
    pass


class BadRange(InputError):
    pass


class EmptyBlock(InputError):
    pass


class ZeroMeasureBlock(InputError):
    pass


class NonMonotoneNorm(InputError):
    pass


class TailTooHeavy(InputError):
    pass


class PreconditionViolated(InputError):
    pass


class SchemaError(InputError):
    pass


class VertexBudgetExceeded(PitensorError):
    pass


class LPInfeasible(PitensorError):
    """The linear program failed although its atom set always spans."""


class BudgetExceeded(PitensorError):
    pass


class SnapFailed(PitensorError):
    def __init__(self, message, atoms=()):
        super().__init__(message)
        self.atoms = list(atoms)


class NotAttainingAtZ(PitensorError):
    pass


class NotNormOne(PitensorError):
    pass


class SolverInconclusive(UserWarning):
    """Issued when no exact-dual solver path is available."""
