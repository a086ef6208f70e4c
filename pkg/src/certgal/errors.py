"""Error taxonomy shared by every module.

Each exception carries a stable ``code`` string so the CLI and the report
writer can surface machine-readable failure causes without parsing prose.
"""

from __future__ import annotations


class CertgalError(Exception):
    """Base class; ``code`` is a stable machine-readable tag."""

    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class ZeroInput(CertgalError):
    code = "ZERO_INPUT"


class NonMonic(CertgalError):
    code = "NONMONIC"


class SmallPrime(CertgalError):
    code = "SMALL_PRIME"


class InsufficientModulus(CertgalError):
    code = "INSUFFICIENT_MODULUS"


class Inconsistent(CertgalError):
    code = "INCONSISTENT"


class LeadingVanishes(CertgalError):
    code = "LEADING_VANISHES"


class Ramified(CertgalError):
    code = "RAMIFIED"


class Reducible(CertgalError):
    code = "REDUCIBLE"


class ConstructionFailed(CertgalError):
    code = "CONSTRUCTION_FAILED"


class NoSolution(CertgalError):
    code = "NO_SOLUTION"


class MultipleSolutions(CertgalError):
    code = "MULTIPLE_SOLUTIONS"


class InconsistentFacts(CertgalError):
    code = "INCONSISTENT_FACTS"


class UnknownType(CertgalError):
    code = "UNKNOWN_TYPE"


class DegreeTooSmall(CertgalError):
    code = "DEGREE_TOO_SMALL"


class BadReduction(CertgalError):
    code = "BAD_REDUCTION"


class HenselObstruction(CertgalError):
    code = "HENSEL_OBSTRUCTION"


class PrecisionLoss(CertgalError):
    code = "PRECISION_LOSS"


class NotMaximal(CertgalError):
    code = "NOT_MAXIMAL"


class PatternMismatch(CertgalError):
    code = "PATTERN_MISMATCH"


class ValueMismatch(CertgalError):
    code = "VALUE_MISMATCH"


class RationalElement(CertgalError):
    code = "RATIONAL_ELEMENT"


class MaximalityFails(CertgalError):
    code = "MAXIMALITY_FAILS"


class SplitDegenerate(CertgalError):
    code = "SPLIT_DEGENERATE"


class NotInert(CertgalError):
    code = "NOT_INERT"


class ShapeMismatch(CertgalError):
    code = "SHAPE_MISMATCH"


class NoTwistWorks(CertgalError):
    code = "NO_TWIST_WORKS"


class Inconclusive(CertgalError):
    """A search or certificate attempt ran out of budget without a verdict."""

    code = "INCONCLUSIVE"


class Fatal(CertgalError):
    """Integrity failure (e.g. a held-out CRT prime disagrees)."""

    code = "FATAL"


# Verdict constants. INCONCLUSIVE is a result state, not an exception:
# searches give up, verifications never lie.
PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
