"""Exception hierarchy shared across the package."""


class BellGeomError(Exception):
    """Base class for all package errors."""


class FamilySpecError(BellGeomError, ValueError):
    """A family-spec string could not be parsed."""


class DomainError(BellGeomError, ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidFamilyError(BellGeomError, ValueError):
    """A correlation function does not belong to the admissible class."""


class BranchConsistencyError(BellGeomError, RuntimeError):
    """The transformation law produced an out-of-range inverse argument."""


class ProtocolError(BellGeomError):
    """A malformed or out-of-order frame was seen on the wire."""


class HarnessError(BellGeomError):
    """Session setup or transport failure in the distributed harness."""
