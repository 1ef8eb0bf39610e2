"""Application settings and configuration."""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Output Configuration
    output_dir: Path = Field(default=Path("reports"), description="Root directory for CSV, plots and reports")
    log_dir: Path = Field(default=Path("logs"), description="Directory for log files")
    plot_format: str = Field(default="png", description="Matplotlib output format")

    # Run Configuration
    log_level: str = Field(default="INFO", description="Logging level")
    parallel_workers: int = Field(default=1, ge=1, description="Worker processes for sweeps")
    default_seed: int = Field(default=20240607, ge=0, description="Seed used when a config gives none")
    trials_per_point: int = Field(default=10, ge=1, description="Default trials per sweep point")

    @property
    def plot_dir(self) -> Path:
        """Get plot directory."""
        return self.output_dir / "plots"


settings = Settings()
