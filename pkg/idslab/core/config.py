from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import ClassVar
import os


class Settings(BaseSettings):
    APP_NAME: str = "idslab"

    # Directory configuration
    BASE_DIR: ClassVar[str] = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    OUTPUT_DIR: str = Field(
        default=os.path.join(BASE_DIR, "data", "outputs"),
        validation_alias=AliasChoices("IDSLAB_OUT", "IDSLAB_OUTPUT_DIR", "OUTPUT_DIR"),
    )

    LOG_LEVEL: str = "INFO"
    WORKERS: int = -1

    # Size caps
    MAX_CELLS_PER_AXIS: int = 200_000
    DENSE_MAX_DOF: int = 4096
    DENSE_SPECTRUM_MAX: int = 600
    DENSE_LDL_MAX: int = 400

    # Spectral tolerances
    EIG_REL_TOL: float = 1e-9
    RESIDUAL_REL_TOL: float = 1e-8
    COUNT_RETRIES: int = 3

    # Energy and quasimomentum grids
    ENERGIES_PER_DECADE: int = 24
    THETA_START: int = 8
    THETA_CAP: int = 128
    THETA_REL_TOL: float = 0.005
    HOMOGENIZED_SUPERCELL: int = 33

    # Experiment defaults
    SANDWICH_TAU: float = 0.5
    APPROX_RHO: float = 1.0
    APPROX_ETA: float = 1.0

    model_config = SettingsConfigDict(
        env_prefix="IDSLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        populate_by_name=True,
    )

    def ensure_directories(self):
        """Ensure the output directory exists."""
        os.makedirs(self.OUTPUT_DIR, exist_ok=True)


settings = Settings()
