"""Exception hierarchy shared by all modules."""


class ArtinIwasawaError(Exception):
    """Base class for every error raised by the package."""


class PrecisionExhausted(ArtinIwasawaError):
    pass


class PrimeMismatch(ArtinIwasawaError):
    pass


class DomainError(ArtinIwasawaError):
    pass


class NotSimpleRoot(ArtinIwasawaError):
    pass


class BadModulus(ArtinIwasawaError):
    pass


class BadGaloisIndex(ArtinIwasawaError):
    pass


class LevelMismatch(ArtinIwasawaError):
    pass


class NotPrimitive(ArtinIwasawaError):
    pass


class InsufficientDepth(ArtinIwasawaError):
    pass


class LevelUnavailable(ArtinIwasawaError):
    pass


class InsufficientVanishing(ArtinIwasawaError):
    pass


class NotDivisible(ArtinIwasawaError):
    pass


class IntegralityViolation(ArtinIwasawaError):
    pass


class TruncationTooShort(ArtinIwasawaError):
    pass


class MissingSeries(ArtinIwasawaError):
    pass


class DepthExhausted(ArtinIwasawaError):
    pass


class NotInIsotypicPart(ArtinIwasawaError):
    pass


class NotStabilizable(ArtinIwasawaError):
    pass


class SingularAtPrecision(ArtinIwasawaError):
    pass


class RamifiedAtP(ArtinIwasawaError):
    pass


class TrivialCharacter(ArtinIwasawaError):
    pass


class OddCharacter(ArtinIwasawaError):
    pass


class SingularWithinBound(ArtinIwasawaError):
    pass


class SingularOMinus(ArtinIwasawaError):
    pass


class InadmissibleStabilization(ArtinIwasawaError):
    pass


class EigenvalueListMismatch(ArtinIwasawaError):
    pass


class IncompleteOrbit(ArtinIwasawaError):
    pass


class DegenerateRegularizer(ArtinIwasawaError):
    pass


class MissingUnitData(ArtinIwasawaError):
    pass


class ConfigError(ArtinIwasawaError):
    """Invalid command line or configuration (exit status 2)."""

    exit_code = 2


class ComputationError(ArtinIwasawaError):
    """A computation failed while running a suite (exit status 3)."""

    exit_code = 3


class GoldenMismatch(ArtinIwasawaError):
    """Stored golden report differs from a fresh run (exit status 1)."""

    exit_code = 1
