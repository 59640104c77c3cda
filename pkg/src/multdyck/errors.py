"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(DomainError):
    """A computation would exceed a configured capacity (enumeration cap, mask width)."""

    def __init__(self, message: str, *, required: int, cap: int):
        super().__init__(message)
        self.required = required
        self.cap = cap
