class DomainError(Exception):
    """Base error of the package. `exit_code` is what the CLI exits with."""

    exit_code = 3

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class UsageError(DomainError):
    exit_code = 2


class ValidationError(DomainError):
    exit_code = 3


class DimensionError(ValidationError):
    pass


class DegenerateClusteringError(ValidationError):
    pass


class NumericalError(DomainError):
    exit_code = 4
