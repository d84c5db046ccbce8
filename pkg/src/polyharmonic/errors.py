"""Exception types shared by the numerical modules."""


class PolyharmonicError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergent(PolyharmonicError, ArithmeticError):
    """A series failed its stopping rule, or was asked to sum outside its disc."""


class PolePassedError(PolyharmonicError, ArithmeticError):
    """A hypergeometric denominator parameter hit zero before the series terminated."""


class DomainError(PolyharmonicError, ValueError):
    """An argument lies outside the region where the routine is valid."""


class GammaPoleError(PolyharmonicError, ArithmeticError):
    """A gamma-function prefactor sits on a pole that cannot be removed."""


class CoincidentPoints(DomainError):
    """Source and field points coincide."""


class RegimeError(DomainError):
    """The requested (d, k) pair is not in the logarithmic regime."""


class StepTooLarge(DomainError):
    """Finite-difference step is too large compared with the point separation."""


class DimensionError(DomainError):
    """The dimension is not supported by the requested coordinate family."""


class ZeroRadius(DomainError):
    """A point sits at the origin, where angles are undefined."""


class QuantumIndexError(PolyharmonicError, IndexError):
    """Quantum numbers violate the ordering constraints of the harmonic."""
