import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from qcoherent.models.qalgebra_model import Deformation, SpectrumSequence, _readonly


class FockOperatorSet(BaseModel):
    """
    Truncated Fock realization on |0>..|n_max-1>.
    a[n-1, n] = sqrt([rho_n]_q); every other matrix is diagonal.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sequence: SpectrumSequence
    n_max: int
    a: np.ndarray               # annihilation, complex (n_max, n_max)
    a_dag: np.ndarray           # creation = a.T (conjugate transpose when gated)
    delta: np.ndarray           # Delta_q = a_dag a, diag [rho_n]_q
    delta_prime: np.ndarray     # diag [rho_{n+1}]_q - q [rho_n]_q
    number: np.ndarray          # diag n, integer
    formal_adjoint: bool = False  # built without the positivity gate

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "FockOperatorSet":
        for name in ("a", "a_dag", "delta", "delta_prime", "number"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        return self

    @property
    def q(self) -> complex:
        return self.sequence.deformation.q


class FMap(BaseModel):
    """F with A = F a, A+ = alpha a+ F, mapping A_q onto the Q-oscillator."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alpha: complex
    f: np.ndarray               # diag f_n
    f_values: np.ndarray        # f_n, n = 0..n_max-1
    target_Q: Deformation
    source: SpectrumSequence

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "FMap":
        object.__setattr__(self, "f", _readonly(self.f))
        object.__setattr__(self, "f_values", _readonly(self.f_values))
        return self


class ResidualReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    relation: str                   # e.g. "a a+ - q a+ a = Delta'"
    rows_checked: int               # rows 0..rows_checked-1
    row_max: list[float]            # max |entry| per checked row

    @computed_field
    @property
    def max_residual(self) -> float:
        return max(self.row_max) if self.row_max else 0.0

    def passed(self, tolerance: float) -> bool:
        return self.max_residual <= tolerance
