from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide defaults, overridable through RIGSOLVE_* env vars or a .env file."""

    LOG_LEVEL: str = "INFO"
    OUT_DIR: str = "out"
    WORKERS: int = 1
    DEFAULT_SEED: int = 0

    # Solver defaults (every one of them can be overridden by --config or flags)
    ALPHA: float = 0.0
    RHO: float = 1.0
    ADMM_ITERS: int = 30
    CD_ITERS: int = 50
    CD_TOL: float = 1e-6
    ADMM_TOL: float = 1e-4
    ZERO_THRESHOLD: float = 1e-6

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="RIGSOLVE_",
        extra="ignore",
    )


settings = Settings()
