"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class SymQubitError(ValueError):
    pass


class NonConvergence(SymQubitError):
    pass


class NotHermitian(SymQubitError):
    pass


class ImaginaryResidue(SymQubitError):
    pass


class NotPositive(SymQubitError):
    pass


class NotSymmetric(SymQubitError):
    """Raised by :func:`symqubit.qstate.to_symmetric`; ``residual`` is the worst violation."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class NotSpecialUnitary(SymQubitError):
    pass


class ThreeNegative(SymQubitError):
    pass


class ConsistencyFailure(SymQubitError):
    pass


class Unphysical(SymQubitError):
    pass


class NotSymplectic(SymQubitError):
    pass
