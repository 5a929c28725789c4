"""Exception hierarchy shared by every module."""


class FractalError(Exception):
    """Base class for all errors raised by fractalscale."""


class CapExceeded(FractalError):
    """An operation would produce more elements than the configured cap."""

    def __init__(self, count, cap, what="elements"):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} {what} exceeds the element cap {cap}; reduce depth or raise --cap")


class NotRealizable(FractalError):
    """The construction has no geometric realization (series-only)."""


class DegenerateGenerator(FractalError):
    """A generator template encloses no bump area."""


class BrokenInvariant(FractalError):
    """An internal geometric invariant failed; indicates a generator or transform bug."""


class DegenerateSegment(FractalError):
    """A segment has coincident endpoints."""


class UnknownName(FractalError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class Unbounded(FractalError):
    """No finite subadditivity bound exists (beta >= 1)."""


class ParseError(FractalError):
    def __init__(self, message, position=None):
        self.position = position
        where = f" at {position}" if position is not None else ""
        super().__init__(f"parse error{where}: {message}")


class ValidationError(FractalError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))
