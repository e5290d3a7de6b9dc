"""Exception hierarchy shared by all modules."""


class SadicError(Exception):
    """Base class for every error raised by this package."""


class EmptyWindowError(SadicError, ValueError):
    """A window length exceeds the word it is taken from."""


class UndefinedInputError(SadicError, ValueError):
    pass


class DomainMismatchError(SadicError, ValueError):
    """A letter or word lies outside the alphabet a morphism acts on."""


class AlphabetMismatchError(SadicError, ValueError):
    pass


class ErasingMorphismError(SadicError, ValueError):
    """Raised when an erasing morphism reaches code that requires non-erasing input."""


class NotProlongableError(SadicError, ValueError):
    pass


class NoGrowthError(SadicError, ValueError):
    pass


class ExhaustedScheduleError(SadicError, IndexError):
    """An explicit power list was read past its end."""


class DegenerateDirectiveError(SadicError, ValueError):
    """Telescoped lengths do not diverge, so no infinite limit exists."""


class NonConvergentDirectiveError(SadicError, ValueError):
    """Successive truncations of a directive word disagree on their overlap."""


class UnknownFixtureError(SadicError, KeyError):
    pass


class InsufficientOccurrencesError(SadicError, ValueError):
    pass


class InsufficientRangeError(SadicError, ValueError):
    pass


class HorizonError(SadicError, ValueError):
    """A requested length lies beyond the certified range of a prefix."""


class PreconditionError(SadicError, ValueError):
    pass


class FormatError(SadicError, ValueError):
    """Malformed word, morphism or directive text."""


class MemoryCapError(SadicError, ValueError):
    """A requested prefix exceeds the configured materialization cap."""


class RangeMismatchError(SadicError, ValueError):
    """Two reports were computed from different prefixes or ranges."""
