"""
fusionkit
Hierarchical audio-visual feature fusion with joint emotion/valence decoding

Implements the runtime factory pattern with:
- Modular configuration loading
- Environment overrides
- Logging setup
"""

import importlib
import logging
import os
from typing import Any, Dict, Optional

from fusionkit.exceptions import ConfigurationException

__version__ = '1.0.0'


CONFIG_MAPPING = {
    'development': 'config.DevelopmentConfig',
    'production': 'config.ProductionConfig',
    'testing': 'config.TestingConfig'
}


def _import_config_class(dotted_path: str):
    module_name, class_name = dotted_path.rsplit('.', 1)
    return getattr(importlib.import_module(module_name), class_name)


def load_config(config_name: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration based on environment

    Args:
        config_name: One of development, production, testing. Defaults
            to FUSIONKIT_ENV, then development.

    Returns:
        Dict of upper-case settings with env overrides applied

    Raises:
        ConfigurationException: if FUSIONKIT_SEED is not an integer
    """
    if config_name is None:
        config_name = os.environ.get('FUSIONKIT_ENV', 'development')

    # Fallback to development config
    dotted_path = CONFIG_MAPPING.get(config_name, CONFIG_MAPPING['development'])
    config_class = _import_config_class(dotted_path)

    settings = {
        key: getattr(config_class, key)
        for key in dir(config_class)
        if key.isupper()
    }

    # Env vars win over class attributes
    seed = os.environ.get('FUSIONKIT_SEED')
    if seed:
        try:
            settings['SEED'] = int(seed)
        except ValueError:
            raise ConfigurationException(
                f"FUSIONKIT_SEED must be an integer, got '{seed}'",
                field_errors={'FUSIONKIT_SEED': 'not an integer'}
            )
    if os.environ.get('FUSIONKIT_LOG_LEVEL'):
        settings['LOG_LEVEL'] = os.environ['FUSIONKIT_LOG_LEVEL']

    return settings


def configure_logging(settings: Dict[str, Any]) -> None:
    """Setup root logging once for the process"""
    logging.basicConfig(
        level=getattr(logging, str(settings.get('LOG_LEVEL', 'INFO')).upper(), logging.INFO),
        format=settings.get('LOG_FORMAT', '%(levelname)s %(name)s: %(message)s')
    )
