"""Exception hierarchy shared by every stage of the pipeline."""


class LinkfixError(Exception):
    """Base class for all errors raised by linkfix."""


class DomainError(LinkfixError, ValueError):
    """An input lies outside the domain of an operation."""


class GenericityError(LinkfixError):
    """A randomly chosen ray was not generic; retrying with another ray may help."""


class ClearanceError(LinkfixError):
    """A point or contour comes too close to a zero or to a chain."""


class OrbitError(LinkfixError, ValueError):
    """Points handed in as a periodic orbit are not one."""


class CertificateError(LinkfixError):
    """The Lipschitz certificate of a map does not satisfy k <= 1."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class DegeneracyError(LinkfixError):
    """The orbit polygon has no usable planar subdivision (overlaps, no bounded face)."""


class ConsistencyError(LinkfixError):
    """Two independent computations that must agree did not."""


class TheoremViolation(LinkfixError):
    """A property guaranteed under Lip(f - Id) <= 1 failed on a certified map."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
