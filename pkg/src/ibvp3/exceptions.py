"""Exception hierarchy shared by the ibvp3 modules."""


class SpecError(ValueError):
    """An input problem document is malformed or violates an invariant."""


class RankError(SpecError):
    """The boundary conditions are linearly dependent."""


class RobinConditionError(SpecError):
    """A boundary condition mixes derivative orders."""


class UnsupportedCouplingError(SpecError):
    """A coupling constant is not a nonzero real number."""


class TableMismatchError(RuntimeError):
    """No classification table row matches a validated problem."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to certify its result."""


class WindingNumberError(NumericalError):
    """The argument-principle integral did not settle on an integer."""


class NewtonError(NumericalError):
    """Newton iteration failed to converge inside its box."""


class BoundaryTieWarning(UserWarning):
    """A zero lies exactly on the real axis, so its half-plane is ambiguous."""


class MultipleZeroWarning(UserWarning):
    """A box counts more zeros than could be separated; possible multiple zero."""


class MissingZeroWarning(UserWarning):
    """No zero lies near an asymptotic prediction (low-lying zeros may stray)."""
