"""
Base exceptions cho fusionkit
"""

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class FusionKitException(Exception):
    """Base exception cho fusionkit errors"""

    def __init__(self, message, exit_code=EXIT_DATA, error_code=None, details=None):
        super().__init__(message)
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code
        self.details = details or {}

    def to_dict(self):
        """Convert exception to dictionary for the machine-readable error line"""
        return {
            'success': False,
            'error': self.message,
            'error_code': self.error_code,
            'details': self.details
        }


class ConfigurationException(FusionKitException):
    """Exception cho invalid run configuration"""

    def __init__(self, message, field_errors=None):
        super().__init__(message, exit_code=EXIT_USAGE, error_code='CONFIG_ERROR')
        if field_errors:
            self.details['field_errors'] = field_errors


class UsageException(FusionKitException):
    """Exception cho command-line misuse"""

    def __init__(self, message="Invalid usage"):
        super().__init__(message, exit_code=EXIT_USAGE, error_code='USAGE_ERROR')


class ContractException(FusionKitException):
    """Exception cho violated preconditions"""

    def __init__(self, message, error_code='CONTRACT_ERROR', details=None):
        super().__init__(message, exit_code=EXIT_DATA, error_code=error_code, details=details)


class DimensionException(ContractException):
    """Exception cho shape mismatches"""

    def __init__(self, message, shapes=None):
        super().__init__(message, error_code='DIMENSION_ERROR')
        if shapes:
            self.details['shapes'] = [list(shape) for shape in shapes]


class AlignmentException(ContractException):
    """Exception cho prediction sets that do not cover the same ids"""

    def __init__(self, message, ids=None):
        super().__init__(message, error_code='ALIGNMENT_ERROR')
        if ids:
            self.details['ids'] = sorted(ids)


class NumericException(FusionKitException):
    """Exception cho non-finite values"""

    def __init__(self, message, error_code='NUMERIC_ERROR', details=None):
        super().__init__(message, exit_code=EXIT_NUMERIC, error_code=error_code, details=details)


class DomainException(NumericException):
    """Exception cho values outside an op's domain"""

    def __init__(self, message):
        super().__init__(message, error_code='DOMAIN_ERROR')


class GradientCheckException(NumericException):
    """Exception cho analytic gradients that disagree with finite differences"""

    def __init__(self, message, failures=None):
        super().__init__(message, error_code='GRADCHECK_FAILED')
        if failures:
            self.details['failures'] = failures
