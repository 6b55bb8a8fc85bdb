"""
Exceptions package
Chứa custom exceptions và exit codes
"""

from fusionkit.exceptions.base import (
    FusionKitException,
    ConfigurationException,
    UsageException,
    ContractException,
    DimensionException,
    AlignmentException,
    NumericException,
    DomainException,
    GradientCheckException,
)
from fusionkit.exceptions.dataset_exception import (
    ParseException,
    SchemaException,
    LabelException,
    EmptyDatasetException,
)

__all__ = [
    'FusionKitException',
    'ConfigurationException',
    'UsageException',
    'ContractException',
    'DimensionException',
    'AlignmentException',
    'NumericException',
    'DomainException',
    'GradientCheckException',
    'ParseException',
    'SchemaException',
    'LabelException',
    'EmptyDatasetException',
]
