import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from qcoherent.models.qalgebra_model import SpectrumSequence, _readonly


class AnalyticSymbol(BaseModel):
    """psi(z) = sum_n z^n <n|psi> / sqrt([rho_n]_q!), held as its Fock amplitudes."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray      # <n|psi>, n = 0..len-1
    sequence: SpectrumSequence

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "AnalyticSymbol":
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty vector")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", _readonly(amps))
        return self

    @property
    def max_level(self) -> int:
        """Highest occupied level (0 for the zero vector)."""
        occupied = np.nonzero(self.amplitudes)[0]
        return int(occupied[-1]) if occupied.size else 0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class ExpansionReport(BaseModel):
    """Coherent state rebuilt from its own symbol through the weight."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z: complex
    reconstructed: np.ndarray
    direct: np.ndarray
    worst_moment_error: float

    @computed_field
    @property
    def deviation(self) -> float:
        return float(np.linalg.norm(self.reconstructed - self.direct))
