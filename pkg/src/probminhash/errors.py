"""Exception types shared across the package."""


class EmptyInputError(ValueError):
    """Raised when a sketcher receives a set with no elements."""


class InvalidParamsError(ValueError):
    """Raised for parameter combinations outside an algorithm's domain."""


class RandomnessFailureError(RuntimeError):
    """Raised when a rejection or coupon-collector loop exceeds its iteration cap.

    With a sound generator this is unreachable in practice; the cap exists so a
    defective random stream fails loudly instead of looping forever.
    """
