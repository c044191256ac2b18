from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Positivity / root-of-unity detection
    ZERO_TOLERANCE: float = 1e-9
    PHASE_UNIT_TOLERANCE: float = 1e-14

    # Series truncation
    SERIES_TOLERANCE: float = 1e-12
    SERIES_MAX_ORDER: int = 400

    # Radial grid for the weight function
    GRID_X_MAX: float = 16.0
    GRID_POINTS: int = 2048
    GRID_DENSE_EXTENT: float = 2.0
    GRID_DENSE_FRACTION: float = 0.5
    GRID_PAD_SIGMAS: float = 12.0
    GRID_TAIL_RATIO: float = 1e-10

    # Regularized Fourier inversion
    EPSILON_LADDER: list[float] = [1e-2, 5e-3, 2.5e-3]
    CUTOFF_THRESHOLD: float = 1e-12
    QUAD_TOLERANCE: float = 1e-10
    QUAD_START_PANELS: int = 1024
    QUAD_MAX_PANELS: int = 262144
    EDGE_TERMS: int = 4                 # boundary derivatives carried exactly at x = 0
    EDGE_DECAY_RATE: float = 2.0
    EDGE_FIT_START: float = 50.0

    # Bargmann-Fock reductions
    MOMENT_TOLERANCE: float = 1e-3

    # Chunked grid evaluation
    MAX_CONCURRENT: int = 4
    CHUNK_SIZE: int = 32

    # CLI
    LOG_LEVEL: str = "INFO"

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "QCOHERENT_"
        extra = "ignore"


settings = Settings()
