import os

import bittensor as bt
from dotenv import load_dotenv

load_dotenv()

LOG_LEVELS = ('info', 'debug', 'trace')


class Config:
    """Configuration of the radial solvers and the command line runner."""

    # Optimizer defaults
    RADIAL_TOL: float = float(os.getenv('RADIAL_TOL', '1e-8'))
    RADIAL_MAX_ITER: int = int(os.getenv('RADIAL_MAX_ITER', '20000'))
    DEFAULT_GRID_N: int = int(os.getenv('DEFAULT_GRID_N', '512'))

    # Armijo line search
    ARMIJO_CONSTANT: float = float(os.getenv('ARMIJO_CONSTANT', '1e-4'))
    STEP_SHRINK: float = float(os.getenv('STEP_SHRINK', '0.5'))
    STEP_GROWTH: float = float(os.getenv('STEP_GROWTH', '1.5'))
    STEP_INITIAL: float = float(os.getenv('STEP_INITIAL', '1.0'))
    STEP_MIN: float = float(os.getenv('STEP_MIN', '1e-14'))
    STALL_WINDOW: int = int(os.getenv('STALL_WINDOW', '5'))

    # Discretization
    GRADIENT_REGULARIZATION: float = float(os.getenv('GRADIENT_REGULARIZATION', '1e-12'))
    METRIC_FLOOR: float = float(os.getenv('METRIC_FLOOR', '1e-6'))
    GRADIENT_CHECK_TOL: float = float(os.getenv('GRADIENT_CHECK_TOL', '1e-4'))
    T0_CROSSCHECK_TOL: float = float(os.getenv('T0_CROSSCHECK_TOL', '1e-12'))

    # Shooting oracle
    SHOOT_TOL: float = float(os.getenv('SHOOT_TOL', '1e-10'))
    SHOOT_MAX_ITER: int = int(os.getenv('SHOOT_MAX_ITER', '200'))
    SHOOT_BLOWUP: float = float(os.getenv('SHOOT_BLOWUP', '1e6'))
    SHOOT_BRACKET_LO: float = float(os.getenv('SHOOT_BRACKET_LO', '1e-3'))
    SHOOT_BRACKET_HI: float = float(os.getenv('SHOOT_BRACKET_HI', '10'))

    # Verification
    VERIFY_RESIDUAL_TOL: float = float(os.getenv('VERIFY_RESIDUAL_TOL', '1e-3'))

    # Runner
    OUTPUT_DIRECTORY: str = os.getenv('OUTPUT_DIRECTORY', 'results')
    SWEEP_MAX_CONCURRENCY: int = int(os.getenv('SWEEP_MAX_CONCURRENCY', '4'))
    LOG_LEVEL: str = os.getenv('LOG_LEVEL', 'info').lower()

    # Development/Debug Configuration
    DEBUG_MODE: bool = os.getenv('DEBUG_MODE', 'false').lower() == 'true'

    @classmethod
    def validate_config(cls) -> bool:
        """Validate configuration settings."""
        errors = []

        if cls.RADIAL_TOL <= 0:
            errors.append(f"RADIAL_TOL must be positive, got {cls.RADIAL_TOL}")

        if cls.RADIAL_MAX_ITER <= 0:
            errors.append(f"RADIAL_MAX_ITER must be positive, got {cls.RADIAL_MAX_ITER}")

        if cls.DEFAULT_GRID_N < 3:
            errors.append(f"DEFAULT_GRID_N must be at least 3, got {cls.DEFAULT_GRID_N}")

        if not (0 < cls.ARMIJO_CONSTANT < 1):
            errors.append(f"ARMIJO_CONSTANT must lie in (0, 1), got {cls.ARMIJO_CONSTANT}")

        if not (0 < cls.STEP_SHRINK < 1):
            errors.append(f"STEP_SHRINK must lie in (0, 1), got {cls.STEP_SHRINK}")

        if cls.STEP_GROWTH < 1:
            errors.append(f"STEP_GROWTH must be at least 1, got {cls.STEP_GROWTH}")

        if not (0 < cls.STEP_MIN < cls.STEP_INITIAL):
            errors.append("STEP_MIN must be positive and below STEP_INITIAL")

        if cls.STALL_WINDOW < 1:
            errors.append("STALL_WINDOW must be positive")

        if cls.GRADIENT_REGULARIZATION <= 0 or cls.METRIC_FLOOR <= 0:
            errors.append("GRADIENT_REGULARIZATION and METRIC_FLOOR must be positive")

        if cls.SHOOT_TOL <= 0 or cls.SHOOT_MAX_ITER <= 0:
            errors.append("SHOOT_TOL and SHOOT_MAX_ITER must be positive")

        if not (0 < cls.SHOOT_BRACKET_LO < cls.SHOOT_BRACKET_HI):
            errors.append(f"shoot bracket must satisfy 0 < lo < hi, got ({cls.SHOOT_BRACKET_LO}, {cls.SHOOT_BRACKET_HI})")

        if cls.VERIFY_RESIDUAL_TOL <= 0:
            errors.append("VERIFY_RESIDUAL_TOL must be positive")

        if cls.SWEEP_MAX_CONCURRENCY <= 0:
            errors.append("SWEEP_MAX_CONCURRENCY must be positive")

        if cls.LOG_LEVEL not in LOG_LEVELS:
            errors.append(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {cls.LOG_LEVEL}")

        if errors:
            bt.logging.error("Configuration Validation Errors:")
            for error in errors:
                bt.logging.error(f"  - {error}")
            return False

        return True


appConfig = Config()


def load_environment_config(env: str = None):
    if env is None:
        env = os.getenv('ENVIRONMENT', 'production')

    if env == 'production':
        appConfig.DEBUG_MODE = False
        appConfig.LOG_LEVEL = os.getenv('LOG_LEVEL', 'info').lower()

    elif env == 'staging':
        appConfig.DEBUG_MODE = False
        appConfig.LOG_LEVEL = os.getenv('LOG_LEVEL', 'debug').lower()

    elif env == 'development':
        appConfig.DEBUG_MODE = True
        appConfig.LOG_LEVEL = os.getenv('LOG_LEVEL', 'debug').lower()

    bt.logging.debug(f"🌍 Loaded {env} environment configuration")


load_environment_config()

if not appConfig.validate_config():
    raise ValueError("Invalid configuration detected. Please check your environment variables.")
