import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, model_validator

from qcoherent.models.qalgebra_model import Deformation, SequenceKind, SpectrumSequence


class OutputFormat(str, Enum):
    JSON = "json"
    CSV  = "csv"


class RunConfig(BaseModel):
    """Validated command-line configuration, echoed verbatim into every JSON report."""
    model_config = ConfigDict(frozen=True)

    sequence: SequenceKind = SequenceKind.SYMMETRIC
    q: float | None = None              # real modulus; q = 1 is the classical case
    theta: float | None = None          # phase angle in radians
    n: int = 0
    n_max: int = 8
    tol: float | None = None
    x_max: float | None = None
    points: int | None = None
    epsilons: list[float] | None = None
    order: int | None = None
    format: OutputFormat | None = None  # None: the command's natural output
    output: str | None = None
    seed: int | None = None
    n_check: int = 6
    z: str = "0"
    z2: str | None = None
    x: str = "1"
    alpha: str = "1"
    regularized: bool = False
    formal: bool = False

    @model_validator(mode="after")
    def _check(self) -> "RunConfig":
        if self.q is not None and self.theta is not None:
            raise ValueError("give either --q or --theta, not both")
        if self.q is not None and (not math.isfinite(self.q) or self.q <= 0):
            raise ValueError(f"--q must be a positive real number, got {self.q}")
        if self.n < 0:
            raise ValueError(f"--n must be non-negative, got {self.n}")
        if self.n_max < 2:
            raise ValueError(f"--n-max must be at least 2, got {self.n_max}")
        if self.n_check < 0:
            raise ValueError(f"--n-check must be non-negative, got {self.n_check}")
        if self.tol is not None and self.tol <= 0:
            raise ValueError(f"--tol must be positive, got {self.tol}")
        if self.points is not None and self.points < 3:
            raise ValueError(f"--points must be at least 3, got {self.points}")
        if self.epsilons is not None and (not self.epsilons or min(self.epsilons) <= 0):
            raise ValueError("--epsilons must be a non-empty list of positive numbers")
        return self

    @property
    def deformation(self) -> Deformation:
        if self.theta is not None:
            return Deformation.phase(self.theta)
        if self.q is None or self.q == 1:
            return Deformation.classical()
        return Deformation.real(self.q)

    @property
    def spectrum(self) -> SpectrumSequence:
        return SpectrumSequence.of(self.sequence, self.deformation)


class RunMetadata(BaseModel):
    model_config = ConfigDict(frozen=True)

    version: str
    runtime_ms: float
    seed: int | None = None


class CommandReport(BaseModel):
    command: str
    config: dict
    results: dict
    metadata: RunMetadata

    def to_document(self) -> dict:
        """Fixed key order; seed only where a random driver used it."""
        meta = {"version": self.metadata.version, "runtime_ms": self.metadata.runtime_ms}
        if self.metadata.seed is not None:
            meta["seed"] = self.metadata.seed
        return {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "metadata": meta,
        }
