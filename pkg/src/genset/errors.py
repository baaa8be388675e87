"""Exception types shared across the package."""


class GensetError(Exception):
    """Base class for all package errors."""


class InvalidArgument(GensetError, ValueError):
    pass


class CapacityError(GensetError):
    """An input exceeds the size an exact routine is willing to handle."""


class EmptyDomainError(GensetError):
    pass


class NoGoodCliqueError(GensetError):
    def __init__(self, message, alpha=None):
        super().__init__(message)
        self.alpha = alpha


class FamilyParseError(GensetError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
