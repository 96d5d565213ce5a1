"""Exception hierarchy shared by every module."""


class IncontestError(Exception):
    """Base class for all errors raised by the package."""


class ValidationError(IncontestError, ValueError):
    """An instance or assignment violates the data model."""


class DuplicateId(ValidationError):
    pass


class UnknownSchoolInPreference(ValidationError):
    pass


class IncompletePriority(ValidationError):
    pass


class NonPositiveCapacity(ValidationError):
    pass


class MissingEntry(ValidationError):
    pass


class UnknownId(IncontestError, LookupError):
    pass


class InconsistentAssignment(ValidationError):
    pass


class MechanismSpecError(IncontestError, ValueError):
    pass


class InvalidPeriod(MechanismSpecError):
    pass


class ListCapExceeded(IncontestError):
    pass


class EmptySet(IncontestError, ValueError):
    pass


class IsHighPrioritySet(IncontestError):
    """A construction needed a set that can be saturated from above, and it cannot."""


class PreconditionViolated(IncontestError):
    pass


class InstanceTooLarge(IncontestError):
    pass


class BudgetExceeded(IncontestError):
    pass
