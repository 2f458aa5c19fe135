"""
Application Configuration
Loads and validates environment variables
"""
from pydantic_settings import BaseSettings
from typing import Optional
from functools import lru_cache


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application
    APP_NAME: str = "Self-Similar Hele-Shaw Shapes"
    APP_VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    # Physical parameters (tau = 1, one-phase limit with K2 = 1)
    DEFAULT_TAU: float = 1.0
    DEFAULT_K_EFF: float = 2.0
    DEFAULT_ATWOOD: float = -1.0

    # Discretization
    DEFAULT_N1: int = 128
    DEFAULT_N2: int = 512

    # Newton iteration
    NEWTON_TOL: float = 1e-10
    NEWTON_FLOOR_TOL: float = 1e-6
    NEWTON_FLOOR_RATIO: float = 0.5
    NEWTON_MAX_ITERS: int = 200
    FD_STEP: float = 1e-6
    JACOBIAN_REFRESH: int = 1
    LSTSQ_RCOND: float = 1e-12
    FAMILY_GAP: float = 1e-2

    # Line search
    LINE_SEARCH_SHRINK: float = 0.5
    LINE_SEARCH_MAX_BACKTRACKS: int = 30

    # Shape factor below which a converged shape is reported as a circle
    CIRCLE_THRESHOLD: float = 1e-8

    # Experiments
    OUTPUT_DIR: str = "results"
    MAX_WORKERS: int = 1

    class Config:
        env_file = ".env"
        case_sensitive = True


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


# Global settings instance
settings = get_settings()
