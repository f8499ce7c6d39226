"""Exception hierarchy shared by all thinsets modules."""


class ThinsetError(Exception):
    """Base class for all errors raised by this package."""


# --- scale chains ---

class NonIntegerRadiusExponent(ThinsetError):
    """e_i * phi_i is not an integer, so the radius is not dyadic."""


class MonotonicityViolation(ThinsetError):
    """A multiplier or exponent schedule is not strictly increasing."""


class DepthTooLarge(ThinsetError):
    """Intermediate integers would exceed the configured bit budget."""


class LevelOutOfRange(ThinsetError):
    pass


# --- sparse dyadic arithmetic ---

class TermCapExceeded(ThinsetError):
    """An operation produced more terms than the configured cap."""


class OutOfUnitInterval(ThinsetError):
    pass


class NonconformingHead(ThinsetError):
    """Internal invariant: a head exponent failed to divide into the
    lattice scale.  Unreachable for valid inputs."""


# --- lattice intersection sets ---

class RegimeViolation(ThinsetError):
    """An operation required a branching/collapse regime the chain lacks."""


class ChainTooShallow(ThinsetError):
    pass


class ConditionFailure(ThinsetError):
    """A tree-construction inequality failed; carries level and condition."""

    def __init__(self, message, level=None, condition=None):
        super().__init__(message)
        self.level = level
        self.condition = condition


class CapExceeded(ThinsetError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class PreconditionFailure(ThinsetError):
    pass


# --- interval evaluation ---

class PrecisionExhausted(ThinsetError):
    """Directed rounding could not separate the two sides of a comparison
    within the precision budget."""


# --- independent Cantor tree ---

class ExhaustedUniverse(ThinsetError):
    pass


class ChoiceFailure(ThinsetError):
    pass


class DuplicateInput(ThinsetError):
    pass


class SearchSpaceTooLarge(ThinsetError):
    pass


# --- digit Cantor set ---

class GrowthPropertyMissing(ThinsetError):
    pass


class UniverseExceeded(ThinsetError):
    pass


class PartitionOverlap(ThinsetError):
    pass


# --- CLI ---

class ConfigError(ThinsetError):
    pass
