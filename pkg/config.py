"""
Configuration settings cho fusionkit
"""

import os


class Config:
    """Base configuration"""
    SEED = 0  # FUSIONKIT_SEED overrides in load_config
    LOG_LEVEL = os.environ.get('FUSIONKIT_LOG_LEVEL') or 'INFO'
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    # Model configuration
    HIDDEN_DIM = 128  # common dimension D of every aligned stream
    DEFAULT_MODALITY_MAP = {
        'HL18': 'acoustic',
        'HL19': 'acoustic',
        'HL20': 'acoustic',
        'MR': 'visual',
        'RF': 'visual',
    }
    DEFAULT_STREAM_DIMS = {
        'HL18': 32,
        'HL19': 32,
        'HL20': 32,
        'MR': 24,
        'RF': 24,
    }

    # Optimizer configuration
    LEARNING_RATE = 1e-3
    ADAM_BETA1 = 0.9
    ADAM_BETA2 = 0.999
    ADAM_EPSILON = 1e-8
    BATCH_SIZE = 32
    MAX_EPOCHS = 200
    PATIENCE = 20
    GRAD_CLIP_NORM = 5.0

    # Metric configuration
    COMBINED_DIM_WEIGHT = 0.25  # com = dis - 0.25 * dim
    ENSEMBLE_GRID_STEP = 0.05

    # Gradient check configuration
    GRADCHECK_STEP = 1e-5
    GRADCHECK_TOLERANCE = 1e-5
    GRADCHECK_HIDDEN_DIM = 8
    GRADCHECK_NUM_CLASSES = 4
    GRADCHECK_BATCH = 4


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False
    LOG_LEVEL = os.environ.get('FUSIONKIT_LOG_LEVEL') or 'WARNING'


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    HIDDEN_DIM = 8
    MAX_EPOCHS = 20
    LOG_LEVEL = 'WARNING'
