"""Custom exceptions for Kac Root Utilities."""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_RESOURCE_GUARD = 3


class KacRootUtilitiesError(Exception):
    """Base exception for Kac Root Utilities."""

    exit_code: int = EXIT_USAGE

    def __init__(self, message: str, error_code: Optional[str] = None):
        """Initialize exception.

        Args:
            message: Error message
            error_code: Optional error code
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code

    def __str__(self) -> str:
        """String representation of the exception."""
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ConfigurationError(KacRootUtilitiesError):
    """Exception raised for configuration errors."""

    def __init__(self, message: str):
        super().__init__(message, "CONFIG_ERROR")


class ValidationError(KacRootUtilitiesError):
    """Invalid argument passed to an operation."""

    def __init__(self, message: str, field: Optional[str] = None):
        """Initialize validation error.

        Args:
            message: Error message
            field: Argument that failed validation
        """
        super().__init__(message, "INVALID_ARGUMENT")
        self.field = field


class InfeasibleError(KacRootUtilitiesError):
    """Request targets a lattice point that a parity certificate rules out."""

    exit_code = EXIT_INFEASIBLE

    def __init__(self, message: str, certificate: str):
        """Initialize infeasibility error.

        Args:
            message: Error message
            certificate: Name of the obstruction
        """
        super().__init__(message, "INFEASIBLE")
        self.certificate = certificate


class ResourceGuardError(KacRootUtilitiesError):
    """Exact computation would exceed its configured size guard."""

    exit_code = EXIT_RESOURCE_GUARD

    def __init__(self, operation: str, requested: int, limit: int, advice: str = ""):
        """Initialize resource guard error.

        Args:
            operation: Operation that hit the guard
            requested: Estimated size of the request
            limit: Configured limit
            advice: What to use instead
        """
        message = f"{operation} needs {requested:,} units, guard is {limit:,}"
        if advice:
            message += f". {advice}"
        super().__init__(message, "RESOURCE_GUARD")
        self.operation = operation
        self.requested = requested
        self.limit = limit
        self.advice = advice


class CertificationError(KacRootUtilitiesError):
    """Floating-point root count could not be certified."""

    def __init__(self, message: str, interval: Optional[tuple] = None):
        super().__init__(message, "CERTIFICATION_FAILED")
        self.interval = interval


class NumericalError(KacRootUtilitiesError):
    """Exception raised when a numerical invariant is violated."""

    def __init__(self, message: str):
        super().__init__(message, "NUMERICAL_ERROR")


class DataError(KacRootUtilitiesError):
    """Exception raised for data processing errors."""

    def __init__(self, message: str, data_type: Optional[str] = None):
        """Initialize data error.

        Args:
            message: Error message
            data_type: Type of data that caused the error
        """
        super().__init__(message, "DATA_ERROR")
        self.data_type = data_type
