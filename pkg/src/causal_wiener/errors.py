"""Exception hierarchy shared by all modules."""


class CausalWienerError(ValueError):
    """Base class for every error raised by this package."""


class InvalidRoots(CausalWienerError):
    """AR or MA polynomial has a root on or inside the unit circle."""


class TruncationInsufficient(CausalWienerError):
    """A truncated sum cannot meet its requested accuracy."""


class DivergentNorm(CausalWienerError):
    """A weighted coefficient norm is infinite for the declared tail model."""


class NotPositiveDefinite(CausalWienerError):
    """Toeplitz matrix failed the Levinson positivity test."""


class SeriesNotConverging(CausalWienerError):
    """Series expansion terms do not decay geometrically."""


class ConstraintViolated(CausalWienerError):
    """Parameter constraint such as r*sin(pi*d) < 1 does not hold."""


class IncompatibleFilter(CausalWienerError):
    """Filter summability class does not match the process memory."""


class InvalidBand(CausalWienerError):
    """Band edges violate 0 <= mu1 < mu2 <= pi."""


class LengthMismatch(CausalWienerError):
    """Coefficient vectors are too short for the requested order."""


class DegenerateFit(CausalWienerError):
    """Rate fit has too few usable points or no variation."""
