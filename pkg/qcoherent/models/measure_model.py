from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from qcoherent.models.qalgebra_model import SpectrumSequence, _readonly


class WeightMethod(str, Enum):
    CLOSED_FORM = "closed-form"             # e^{-x}/pi
    REGULARIZED_CLOSED_FORM = "regularized-closed-form"
    QUADRATURE = "quadrature"               # Filon on [-Y, Y]
    MONOMIAL = "monomial"                   # Gaussian-derivative sum
    EXTRAPOLATED = "extrapolated"           # Richardson in epsilon


class MomentTarget(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sequence: SpectrumSequence
    n_max: int
    mu: np.ndarray              # [rho_n]_q! / pi, n = 0..n_max

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "MomentTarget":
        object.__setattr__(self, "mu", _readonly(self.mu))
        return self


class WbarValue(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: complex
    order: int                  # last index summed
    last_term: float            # |last included term|
    resummed: bool = False      # closed-form continuation outside |y| < 1


class MomentRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    achieved: float
    target: float
    rel_error: float


class MomentReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: list[MomentRow]

    @computed_field
    @property
    def max_rel_error(self) -> float:
        return max((r.rel_error for r in self.rows), default=0.0)

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error <= tolerance


class WeightTable(BaseModel):
    """
    Radial weight W~(x) sampled on a grid. Grids for regularized tables start
    below zero: the Gaussian damping spills mass to x < 0.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sequence: SpectrumSequence
    grid: np.ndarray
    values: np.ndarray
    method: WeightMethod
    epsilon: float = 0.0                    # 0 for closed-form / extrapolated tables
    y_cutoff: float | None = None
    series_order: int | None = None
    imag_residue: float = 0.0               # max|Im| / max|Re| of the inversion
    ladder: list[float] = []                # epsilons behind an extrapolated table
    edge_terms: int = 0                     # boundary derivatives carried by the edge reference
    moment_report: MomentReport | None = None

    @model_validator(mode="after")
    def _freeze_arrays(self) -> "WeightTable":
        if self.grid.shape != self.values.shape:
            raise ValueError(f"grid {self.grid.shape} and values {self.values.shape} differ")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", _readonly(self.grid))
        object.__setattr__(self, "values", _readonly(self.values))
        return self

    def with_report(self, report: MomentReport) -> "WeightTable":
        return self.model_copy(update={"moment_report": report})
