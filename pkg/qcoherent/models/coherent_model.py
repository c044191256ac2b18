import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from qcoherent.models.qalgebra_model import SpectrumSequence, _readonly


class CoherentState(BaseModel):
    """
    ||q,z> = N(|z|^2) sum_n z^n / sqrt([rho_n]_q!) |n>, truncated to n_max levels.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z: complex
    sequence: SpectrumSequence
    n_max: int                      # levels kept, |0>..|n_max-1>
    raw_coeffs: np.ndarray          # z^n / sqrt([rho_n]!), raw_coeffs[0] = 1
    coeffs: np.ndarray              # normalized amplitudes
    norm_const: float               # exp_q(|z|^2)^(-1/2)
    tail_bound: float               # bound on the neglected normalized l2 mass
    terminated: bool = False        # ladder ends at a vanishing box value

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "CoherentState":
        object.__setattr__(self, "raw_coeffs", _readonly(self.raw_coeffs))
        object.__setattr__(self, "coeffs", _readonly(self.coeffs))
        return self

    @computed_field
    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def padded(self, size: int) -> np.ndarray:
        """Normalized amplitudes zero-extended to `size` levels."""
        out = np.zeros(size, dtype=complex)
        out[: self.n_max] = self.coeffs
        return out


class ContinuityGap(BaseModel):
    model_config = ConfigDict(frozen=True)

    lhs: float                      # || v1 - v2 ||^2
    rhs: float                      # 2 (1 - Re <z|z'>)

    @computed_field
    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)
