"""Core configuration management."""
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI settings."""

    # Application
    app_env: str = "development"
    log_level: str = "WARNING"
    log_json: bool = True

    # Randomized checks
    default_seed: int = Field(default=42, description="Seed used when a command gets no --seed")
    default_samples: int = Field(default=1000, ge=1, description="Sample count for analytic checks")
    sample_box: float = Field(default=10.0, gt=0, description="Half-width of the sampling box")

    # Comparisons
    comparison_margin: float = Field(default=1e-9, ge=0, description="Margin eta for verification suites")

    # Exhaustive checks
    max_workers: int = Field(default=4, ge=1)
    subset_enumeration_cap: int = Field(default=12, ge=1)
    max_reported_witnesses: int = Field(default=20, ge=1)

    # Metric repair
    repair_bump_factor: float = Field(default=1e-3, gt=0)

    # Continuity probes
    probe_tolerance: float = Field(default=1e-6, gt=0)
    probe_horizon: int = Field(default=10_000, ge=1)
    continuity_halvings: int = Field(default=30, ge=0)

    # Solver
    picard_max_iter: int = Field(default=1000, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="SOFTFIX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"  # Ignore extra fields in .env
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
