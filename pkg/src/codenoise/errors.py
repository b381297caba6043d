"""Exception types shared across modules."""


class CapacityError(RuntimeError):
    """An enumeration or dense array would exceed the supported budget."""


class InconsistencyError(ValueError):
    """Input data contradicts the structure it claims to have."""


class ContractViolation(AssertionError):
    """A guaranteed inequality or identity failed numerically."""
