"""Exception types raised by the library."""


class HybridPrecodeError(Exception):
    """Base class for all library errors."""


class RankDeficient(HybridPrecodeError, ValueError):
    """Gram matrix of an RF precoder is singular to within tolerance."""


class ShapeMismatch(HybridPrecodeError, ValueError):
    pass


class TooLarge(HybridPrecodeError, ValueError):
    """Exhaustive search space exceeds the configured guard."""


class ConfigInvalid(HybridPrecodeError, ValueError):
    pass


class EmptyResults(HybridPrecodeError, ValueError):
    pass
