import cmath
import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from qcoherent.config import settings
from qcoherent.utils.errors import InvalidDeformation


class DeformationKind(str, Enum):
    CLASSICAL = "classical"
    REAL_Q    = "real"
    PHASE_Q   = "phase"


class SequenceKind(str, Enum):
    LINEAR    = "linear"
    ARIK_COON = "arik-coon"
    SYMMETRIC = "symmetric"
    FIBONACCI = "fibonacci"


class Deformation(BaseModel):
    """
    Deformation parameter q.
    Build through classical() / real(q) / phase(theta) rather than by hand;
    the validator rejects inconsistent (kind, value, angle) triples.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: DeformationKind
    value: complex
    phase_angle: float = 0.0          # theta, radians; PhaseQ only

    @model_validator(mode="after")
    def _check_kind(self) -> "Deformation":
        q = complex(self.value)
        if self.kind is DeformationKind.CLASSICAL:
            if q != 1:
                raise InvalidDeformation(f"classical deformation requires q = 1, got {q}")
        elif self.kind is DeformationKind.REAL_Q:
            if q.imag != 0 or q.real <= 0 or q.real == 1:
                raise InvalidDeformation(f"real deformation requires real q > 0, q != 1, got {q}")
        else:
            if not 0 < self.phase_angle < math.pi:
                raise InvalidDeformation(
                    f"phase angle must lie in (0, pi), got {self.phase_angle!r}"
                )
            if abs(abs(q) - 1) > settings.PHASE_UNIT_TOLERANCE:
                raise InvalidDeformation(f"phase deformation requires |q| = 1, got |q| = {abs(q)!r}")
            if abs(q - cmath.exp(1j * self.phase_angle)) > 1e-12:
                raise InvalidDeformation("q does not match exp(i*theta)")
        return self

    @classmethod
    def classical(cls) -> "Deformation":
        return cls(kind=DeformationKind.CLASSICAL, value=1 + 0j)

    @classmethod
    def real(cls, q: float) -> "Deformation":
        return cls(kind=DeformationKind.REAL_Q, value=complex(float(q), 0.0))

    @classmethod
    def phase(cls, theta: float) -> "Deformation":
        theta = float(theta)
        return cls(kind=DeformationKind.PHASE_Q, value=cmath.exp(1j * theta), phase_angle=theta)

    @property
    def q(self) -> complex:
        return complex(self.value)

    @property
    def label(self) -> str:
        if self.kind is DeformationKind.CLASSICAL:
            return "q=1"
        if self.kind is DeformationKind.REAL_Q:
            return f"q={self.q.real:g}"
        return f"theta={self.phase_angle:.6g}"


class SpectrumSequence(BaseModel):
    """Sequence family rho_n together with the box function that deforms it."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: SequenceKind
    deformation: Deformation

    @classmethod
    def of(cls, kind: SequenceKind | str, deformation: Deformation | None = None) -> "SpectrumSequence":
        return cls(kind=SequenceKind(kind), deformation=deformation or Deformation.classical())

    @computed_field
    @property
    def self_conjugate(self) -> bool:
        """[rho_n]_q equals its complex conjugate for every n."""
        if self.deformation.kind is not DeformationKind.PHASE_Q:
            return True
        return self.kind in (SequenceKind.LINEAR, SequenceKind.SYMMETRIC, SequenceKind.FIBONACCI)

    @property
    def label(self) -> str:
        return f"{self.kind.value}[{self.deformation.label}]"


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


class QFactorialTable(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sequence: SpectrumSequence
    n_max: int
    values: np.ndarray          # [rho_n]_q!, n = 0..n_max
    log_values: np.ndarray      # log of the same, overflow-safe

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "QFactorialTable":
        object.__setattr__(self, "values", _readonly(self.values))
        object.__setattr__(self, "log_values", _readonly(self.log_values))
        return self


class SeriesValue(BaseModel):
    """Partial sum of a deformed-exponential series with its truncation record."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: complex
    order: int                  # index of the last term included
    tail_bound: float           # rigorous bound on the neglected terms
    rounding_bound: float = 0.0  # floating-point error of the partial sum
    terminated: bool = False    # series ends at a root-of-unity level (finite sum)

    @computed_field
    @property
    def error_bound(self) -> float:
        """Bound on |exp_q(x) - value|."""
        return self.tail_bound + self.rounding_bound
