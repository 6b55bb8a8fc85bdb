"""
Exceptions raised while reading feature, prediction and synthetic-data settings files.
"""

from fusionkit.exceptions.base import FusionKitException, EXIT_DATA


class ParseException(FusionKitException):
    """
    Exception raised when a record cannot be parsed.

    The line number is 1-based and refers to the offending file line.
    """

    def __init__(self, message, line=None):
        super().__init__(message, exit_code=EXIT_DATA, error_code='PARSE_ERROR')
        if line is not None:
            self.details['line'] = line


class SchemaException(FusionKitException):
    """Exception raised when a record disagrees with the dataset manifest"""

    def __init__(self, message, stream=None, line=None):
        super().__init__(message, exit_code=EXIT_DATA, error_code='SCHEMA_ERROR')
        if stream is not None:
            self.details['stream'] = stream
        if line is not None:
            self.details['line'] = line


class LabelException(FusionKitException):
    """Exception raised when an emotion index is outside [0, C)"""

    def __init__(self, message, line=None, label=None):
        super().__init__(message, exit_code=EXIT_DATA, error_code='LABEL_ERROR')
        if line is not None:
            self.details['line'] = line
        if label is not None:
            self.details['label'] = label


class EmptyDatasetException(FusionKitException):
    """Exception raised when a dataset file has no records"""

    def __init__(self, message="Dataset contains no records"):
        super().__init__(message, exit_code=EXIT_DATA, error_code='EMPTY_DATASET')
