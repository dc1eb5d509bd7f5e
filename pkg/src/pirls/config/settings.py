"""
Application settings and configuration management.
Uses Pydantic to load and validate environment variables (prefix ``PIRLS_``).
"""
from typing import Optional

import psutil
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="PIRLS_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",  # Ignore extra environment variables
    )

    # Sweep Configuration
    threads: Optional[int] = Field(
        default=None, ge=1, description="Cap on concurrent sweep repetitions (default: processor count)"
    )

    # Solver Defaults
    epsilon: float = Field(default=1e-8, gt=0.0, le=1.0, description="Default relative accuracy")
    line_search_tol: float = Field(default=1e-12, gt=0.0, description="Line-search bracket width")
    linear_tol: float = Field(default=1e-12, gt=0.0, description="Relative Cholesky pivot floor")
    normalize: bool = Field(default=True, description="Rescale b and d by the initial residual norm")
    max_iterations_cap: int = Field(default=100000, ge=1, description="Hard cap on p-IRLS iterations")

    # Application Settings
    log_level: str = Field(default="WARNING", description="Logging level")
    debug: bool = Field(default=False, description="Debug mode")
    environment: str = Field(default="development", description="Application environment")

    @property
    def effective_threads(self) -> int:
        """Worker count for sweeps: the configured cap, else the processor count."""
        if self.threads is not None:
            return self.threads
        return psutil.cpu_count(logical=True) or 1


# Create global settings instance
settings = Settings()
