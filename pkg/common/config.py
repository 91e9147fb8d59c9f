"""
Runtime settings
Read from QOSC_* environment variables
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults and logging options shared by the library and the CLI"""

    model_config = SettingsConfigDict(env_prefix="QOSC_", extra="ignore")

    log_level: str = Field("WARNING", description="Log level for the qosc CLI")
    environment: str = Field("development", description="development or production")

    series_tol: float = Field(1e-14, gt=0, description="Absolute tail bound for infinite series")
    series_max_terms: int = Field(10000, ge=1, description="Hard cap on series terms")
    dim_cap: int = Field(2048, ge=4, description="Largest truncated Fock dimension the oracle builds")
    sigma_cap: int = Field(512, ge=1, description="Largest Fock expansion length for eigenstates")
    jacobi_tol: float = Field(1e-14, gt=0, description="Relative off-diagonal threshold for Jacobi sweeps")
    jacobi_max_sweeps: int = Field(60, ge=1, description="Sweep cap for the Jacobi eigensolver")

    @property
    def is_production(self) -> bool:
        return self.environment.lower() == "production"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Cached settings instance"""
    return Settings()
