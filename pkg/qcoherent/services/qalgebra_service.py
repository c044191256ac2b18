"""
qalgebra_service.py — box functions [rho_n]_q, q-factorials and the deformed
exponential exp_q(x) = sum_n x^n / [rho_n]_q!.

Box functions share one interface (BaseBoxFunction); get_box_function() picks
the implementation for a SpectrumSequence, the same way every consumer gets
its values.
"""
import logging
import math
from abc import ABC, abstractmethod

import numpy as np

from qcoherent.config import settings
from qcoherent.models.qalgebra_model import (
    Deformation,
    DeformationKind,
    QFactorialTable,
    SequenceKind,
    SeriesValue,
    SpectrumSequence,
)
from qcoherent.utils.errors import (
    DivisionByZero,
    NoConvergence,
    NonRealValue,
    PositivityViolation,
    PrecisionLoss,
    RootOfUnity,
)

logger = logging.getLogger(__name__)

_UNIT_ROUNDOFF = 2.0 ** -53


# ─────────────────────────────────────────────────────────────────
# Box functions
# ─────────────────────────────────────────────────────────────────

class BaseBoxFunction(ABC):

    # box(k) >= box(n) for all k >= n >= 1; the exp_q tail bound relies on it
    monotone: bool = True

    def __init__(self, deformation: Deformation) -> None:
        self.deformation = deformation

    @abstractmethod
    def values(self, n_max: int) -> np.ndarray:
        """Real box values for n = 0..n_max (float64, length n_max + 1)."""
        ...

    def value(self, n: int) -> float:
        return float(self.values(n)[n])

    def complex_value(self, n: int) -> complex:
        """Direct evaluation of the closed form in complex arithmetic."""
        return complex(self.value(n))


class LinearBox(BaseBoxFunction):

    def values(self, n_max: int) -> np.ndarray:
        return np.arange(n_max + 1, dtype=float)


class ArikCoonBox(BaseBoxFunction):
    """(1 - q^n)/(1 - q); complex for a phase q, hence not self-conjugate there."""

    def values(self, n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1, dtype=float)
        kind = self.deformation.kind
        if kind is DeformationKind.CLASSICAL:
            return n
        if kind is DeformationKind.PHASE_Q:
            raise NonRealValue(
                f"Arik-Coon box is complex for phase q ({self.deformation.label})"
            )
        lam = math.log(self.deformation.q.real)
        with np.errstate(over="ignore"):
            return np.expm1(n * lam) / math.expm1(lam)

    def complex_value(self, n: int) -> complex:
        q = self.deformation.q
        if self.deformation.kind is DeformationKind.CLASSICAL:
            return complex(n)
        return (1 - q**n) / (1 - q)


class SymmetricBox(BaseBoxFunction):
    """(q^n - q^-n)/(q - q^-1): sinh ratio for real q, sine ratio for a phase."""

    def __init__(self, deformation: Deformation) -> None:
        super().__init__(deformation)
        self.monotone = deformation.kind is not DeformationKind.PHASE_Q

    def values(self, n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1, dtype=float)
        kind = self.deformation.kind
        if kind is DeformationKind.CLASSICAL:
            return n
        if kind is DeformationKind.REAL_Q:
            lam = math.log(self.deformation.q.real)
            with np.errstate(over="ignore"):
                return np.sinh(n * lam) / math.sinh(lam)
        theta = self.deformation.phase_angle
        sin_theta = math.sin(theta)
        if abs(sin_theta) <= settings.ZERO_TOLERANCE:
            raise RootOfUnity(f"sin(theta) vanishes for theta={theta!r}")
        return np.sin(n * theta) / sin_theta

    def complex_value(self, n: int) -> complex:
        q = self.deformation.q
        if self.deformation.kind is DeformationKind.CLASSICAL:
            return complex(n)
        return (q**n - q**(-n)) / (q - 1 / q)


class FibonacciBox(BaseBoxFunction):
    """F_n with F_1 = F_2 = 1; carries no deformation."""

    def values(self, n_max: int) -> np.ndarray:
        out = np.zeros(n_max + 1, dtype=float)
        if n_max >= 1:
            out[1] = 1.0
        for k in range(2, n_max + 1):
            out[k] = out[k - 1] + out[k - 2]
        return out


_BOX_FUNCTIONS: dict[SequenceKind, type[BaseBoxFunction]] = {
    SequenceKind.LINEAR:    LinearBox,
    SequenceKind.ARIK_COON: ArikCoonBox,
    SequenceKind.SYMMETRIC: SymmetricBox,
    SequenceKind.FIBONACCI: FibonacciBox,
}


def get_box_function(sequence: SpectrumSequence) -> BaseBoxFunction:
    return _BOX_FUNCTIONS[sequence.kind](sequence.deformation)


# ─────────────────────────────────────────────────────────────────
# Public API: box values and factorials
# ─────────────────────────────────────────────────────────────────

def box_value(sequence: SpectrumSequence, n: int) -> float:
    """[rho_n]_q as a real number (n = 0 gives 0)."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return get_box_function(sequence).value(n)


def box_values(sequence: SpectrumSequence, n_max: int) -> np.ndarray:
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    return get_box_function(sequence).values(n_max)


def box_value_complex(sequence: SpectrumSequence, n: int) -> complex:
    return get_box_function(sequence).complex_value(n)


def first_nonpositive(sequence: SpectrumSequence, n_max: int) -> int | None:
    """Smallest n in 1..n_max with box(n) <= ZERO_TOLERANCE, else None."""
    boxes = box_values(sequence, n_max)
    bad = np.nonzero(boxes[1:] <= settings.ZERO_TOLERANCE)[0]
    return int(bad[0]) + 1 if bad.size else None


def admissible_levels(sequence: SpectrumSequence, limit: int) -> int:
    """
    Number of Fock levels 0..H-1 reachable before the first non-positive box,
    capped at `limit`. For a phase q = exp(i*pi/m) with the symmetric box this is m.
    """
    n_bad = first_nonpositive(sequence, limit)
    return limit if n_bad is None else min(n_bad, limit)


def q_factorial(sequence: SpectrumSequence, n_max: int) -> QFactorialTable:
    """
    [rho_n]_q! for n = 0..n_max via running products (linear and log domain).
    Fails fast with PositivityViolation at the first non-positive box value.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    boxes = box_values(sequence, n_max)
    n_bad = first_nonpositive(sequence, n_max)
    if n_bad is not None:
        raise PositivityViolation(n_bad, float(boxes[n_bad]))

    log_values = np.concatenate(([0.0], np.cumsum(np.log(boxes[1:]))))
    with np.errstate(over="ignore"):
        values = np.concatenate(([1.0], np.cumprod(boxes[1:])))
    return QFactorialTable(
        sequence=sequence, n_max=n_max, values=values, log_values=log_values,
    )


# ─────────────────────────────────────────────────────────────────
# Deformed exponential
# ─────────────────────────────────────────────────────────────────

def _tail_floor(boxes: np.ndarray, n: int, monotone: bool) -> float:
    """Lower bound on box(k) for every k > n that can still contribute."""
    if monotone:
        return float(boxes[n + 1])
    rest = boxes[n + 1:]
    stop = np.nonzero(np.abs(rest) <= settings.ZERO_TOLERANCE)[0]
    if stop.size == 0:
        # no terminating level within the horizon: no uniform lower bound
        return 0.0
    live = rest[: stop[0]]
    return float(live.min()) if live.size else math.inf


def _rounding_bound(order: int, magnitude: float) -> float:
    """Forward error of `order` complex additions whose terms sum to `magnitude` in modulus."""
    return 2 * (order + 1) * _UNIT_ROUNDOFF * magnitude


def exp_q_series(
    sequence: SpectrumSequence,
    x: complex,
    tolerance: float | None = None,
    relative: bool = False,
    max_order: int | None = None,
) -> SeriesValue:
    """
    Partial sum of sum_n x^n/[rho_n]_q! with a rigorous stopping rule.

    Once |x|/box(k) < 1/2 for every remaining k the tail is dominated by a
    geometric series with ratio 1/2, so it is at most twice the first neglected
    term. A box value that vanishes exactly ends the series (root of unity);
    a negative one before certification raises PositivityViolation.

    The rounding error of the running sum grows with sum_n |term_n|, which
    for negative or complex x can exceed the result by many orders of
    magnitude. It is reported as rounding_bound, and PrecisionLoss is raised
    once it alone exceeds the tolerance.
    With relative=True both bounds are compared against tolerance * |partial sum|
    (valid for x >= 0, where partial sums increase).
    """
    tolerance = settings.SERIES_TOLERANCE if tolerance is None else tolerance
    max_order = settings.SERIES_MAX_ORDER if max_order is None else max_order
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if not sequence.self_conjugate:
        raise NonRealValue(f"{sequence.label} is not self-conjugate")

    box_fn = get_box_function(sequence)
    boxes = box_fn.values(max_order + 1)
    x = complex(x)
    ax = abs(x)

    total = 1 + 0j
    term = 1 + 0j
    magnitude = 1.0
    if ax == 0:
        return SeriesValue(value=total, order=0, tail_bound=0.0)

    def finished(order: int, tail: float, terminated: bool = False) -> SeriesValue | None:
        rounding = _rounding_bound(order, magnitude)
        limit = tolerance * abs(total) if relative else tolerance
        if rounding >= limit:
            raise PrecisionLoss(order, rounding, limit)
        if not terminated and tail + rounding >= limit:
            return None
        return SeriesValue(
            value=total, order=order, tail_bound=tail, rounding_bound=rounding,
            terminated=terminated,
        )

    bound = math.inf
    for n in range(1, max_order + 1):
        b = float(boxes[n])
        if abs(b) <= settings.ZERO_TOLERANCE:
            logger.debug("%s: ladder terminates at n=%d", sequence.label, n)
            return finished(n - 1, 0.0, terminated=True)
        if b < 0:
            raise PositivityViolation(n, b)
        term = term * x / b
        total += term
        magnitude += abs(term)

        floor = _tail_floor(boxes, n, box_fn.monotone)
        if floor == math.inf:
            # every remaining level vanishes
            return finished(n, 0.0, terminated=True)
        if floor > 2 * ax:
            bound = 2 * abs(term) * ax / float(boxes[n + 1]) if boxes[n + 1] > 0 else math.inf
            result = finished(n, bound)
            if result is not None:
                return result

    raise NoConvergence(max_order, bound)


def exp_q(sequence: SpectrumSequence, x: complex, tolerance: float | None = None) -> complex:
    return exp_q_series(sequence, x, tolerance).value


def exp_q_reciprocal(
    sequence: SpectrumSequence, x: complex, tolerance: float | None = None, relative: bool = False,
) -> complex:
    """
    1/exp_q(x). This is what exp_q(-t) stands for in the normalization and
    overlap formulas; it is never the series evaluated at -x.
    """
    tolerance = settings.SERIES_TOLERANCE if tolerance is None else tolerance
    value = exp_q_series(sequence, x, tolerance, relative=relative).value
    if abs(value) < tolerance:
        raise DivisionByZero(f"|exp_q({x})| = {abs(value):.3g} is below tolerance")
    return 1 / value


def exp_q_sqrt_reciprocal(
    sequence: SpectrumSequence, t: float, tolerance: float | None = None, relative: bool = False,
) -> float:
    """exp_q(t)^(-1/2) for t >= 0, the normalization constant N(t)."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    return float(exp_q_reciprocal(sequence, t, tolerance, relative).real) ** 0.5
