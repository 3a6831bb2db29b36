"""Environment variable configuration using Pydantic Settings."""
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_prefix="SETSIM_", extra="ignore")

    # Logging
    log_level: str = "WARNING"

    # Time quadrature defaults (scenario files and CLI flags override)
    tolerance: float = Field(default=1e-4, gt=0)
    max_doublings: int = Field(default=6, ge=0)
    base_nodes: int = Field(default=64, ge=2)

    # Ratios
    narrowness_factor: float = Field(default=20.0, gt=0)  # waveform width <= feature / factor
    pair_number_floor: float = Field(default=1e-30, ge=0)

    # Oracle
    oracle_refinement: int = Field(default=4, ge=2)
    oracle_max_cells: int = Field(default=1_000_000, gt=0)


@lru_cache
def get_settings() -> Settings:
    return Settings()
