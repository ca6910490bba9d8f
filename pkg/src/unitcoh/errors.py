"""Exception types shared across the package."""


class UnitcohError(Exception):
    pass


# -- coefficient arithmetic ------------------------------------------------

class NonUnit(UnitcohError):
    """Tried to invert an element divisible by p."""


class HenselFailure(UnitcohError):
    """Approximate root does not satisfy the Hensel regime condition."""


class PrecisionExhausted(UnitcohError):
    """A computation needs more digits than the ambient precision holds."""


# -- tower construction ----------------------------------------------------

class NotEisenstein(UnitcohError):
    pass


class NotIrreducibleResiduePoly(UnitcohError):
    pass


class PrecisionTooSmall(UnitcohError):
    pass


class DivisionByIndistinguishableZero(UnitcohError):
    """Divisor has valuation >= the working precision."""


class NegativeValuation(UnitcohError):
    pass


# -- Galois / ramification -------------------------------------------------

class NotGalois(UnitcohError):
    """Fewer automorphisms than the field degree."""


class NotInLevel(UnitcohError):
    """Group element not in the requested ramification subgroup."""


class LevelMismatch(UnitcohError):
    pass


# -- modules / cohomology --------------------------------------------------

class WrongLevel(UnitcohError):
    """Unit does not lie in the level the module presents."""


class LayerMismatch(UnitcohError):
    pass


class NotASubgroup(UnitcohError):
    pass


class NotACocycle(UnitcohError):
    pass


class NotEquivariant(UnitcohError):
    pass


class BudgetExceeded(UnitcohError):
    """Brute-force enumeration would exceed the configured budget."""


class InfiniteOrder(UnitcohError):
    pass


class NoSolution(UnitcohError):
    """Linear system has no solution modulo the lattice.

    Carries a certificate: a pair (functional, modulus) with
    functional @ A == 0 and functional @ R == 0 modulo `modulus`
    (modulus 0 means exactly over the integers) while
    functional @ b != 0 modulo `modulus`.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


# -- verifier ----------------------------------------------------------------

class NoStabilization(UnitcohError):
    """Cohomology invariants kept changing up to the precision cap."""


class ConfigError(UnitcohError):
    pass
