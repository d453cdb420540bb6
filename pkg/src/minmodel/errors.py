"""Error types shared across the package."""


class MinModelError(Exception):
    """Base class for all package errors."""


class NonIntegralArgument(MinModelError):
    """A Gaussian-binomial top argument failed to be an integer."""


class FractionalExponent(MinModelError):
    """A polynomial exponent failed the quarter-lattice integrality gate."""


class NotCoprime(MinModelError):
    """gcd(p, p') != 1."""


class OutOfRange(MinModelError):
    """An index or label lies outside its admissible range."""


class ParityMismatch(MinModelError):
    """L and a-b (or an analogous pair) have different parities."""


class NotProductCase(MinModelError):
    """(p, p', r, s) matches none of the product-form families."""


class CapExceeded(MinModelError):
    """A brute-force enumeration request exceeds the configured cap."""


class IndexOverflow(MinModelError):
    """A run modification pushed an index past its admissible bound."""


class MissingContext(MinModelError):
    """A gamma special case fired but the (a, b) or L context is absent."""


class UnstableTruncation(MinModelError):
    """Two consecutive enumeration bounds disagreed on the truncated output."""


class AmbiguousMembership(MinModelError):
    """A height is in both Takahashi sets and no membership policy is set."""
