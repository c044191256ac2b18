"""
coherent_service.py — eigenstates of the deformed annihilation operator,
their overlaps and the continuity identity.

The truncation order comes from the exp_q tail at x = |z|^2, with the tail
measured relative to the partial sum, so tail_bound is directly the
neglected share of the normalized state.
"""
import logging

import numpy as np

from qcoherent.config import settings
from qcoherent.models.coherent_model import CoherentState, ContinuityGap
from qcoherent.models.fock_model import FockOperatorSet
from qcoherent.models.qalgebra_model import SpectrumSequence
from qcoherent.services.qalgebra_service import box_values, exp_q_series, exp_q_sqrt_reciprocal
from qcoherent.utils.errors import DimensionMismatch, NonRealValue, SequenceMismatch

logger = logging.getLogger(__name__)


def _raw_coefficients(boxes: np.ndarray, z: complex, levels: int) -> np.ndarray:
    """c_0 = 1, c_n = c_{n-1} z / sqrt(box(n))."""
    raw = np.ones(levels, dtype=complex)
    for n in range(1, levels):
        raw[n] = raw[n - 1] * z / np.sqrt(boxes[n])
    return raw


def build_state(
    sequence: SpectrumSequence, z: complex, tolerance: float | None = None,
) -> CoherentState:
    tolerance = settings.SERIES_TOLERANCE if tolerance is None else tolerance
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if not sequence.self_conjugate:
        raise NonRealValue(f"{sequence.label} has no real normalization")

    z = complex(z)
    x = abs(z) ** 2
    series = exp_q_series(sequence, x, tolerance, relative=True)
    levels = series.order + 1

    boxes = box_values(sequence, levels)
    raw = _raw_coefficients(boxes, z, levels)
    partial = float(series.value.real)
    norm_const = exp_q_sqrt_reciprocal(sequence, x, tolerance, relative=True)
    tail = series.tail_bound / partial

    logger.debug(
        "state %s z=%s: %d levels, tail %.3g%s",
        sequence.label, z, levels, tail, " (terminated)" if series.terminated else "",
    )
    return CoherentState(
        z=z,
        sequence=sequence,
        n_max=levels,
        raw_coeffs=raw,
        coeffs=raw * norm_const,
        norm_const=norm_const,
        tail_bound=tail,
        terminated=series.terminated,
    )


def eigen_residual(state: CoherentState, ops: FockOperatorSet) -> float:
    """
    ||a v - z v|| / ||v|| on rows 0..ops.n_max-2, v zero-padded to the
    operator dimension.
    """
    if ops.n_max < state.n_max:
        raise DimensionMismatch(
            f"operators have {ops.n_max} levels, the state needs {state.n_max}"
        )
    if ops.sequence != state.sequence:
        raise SequenceMismatch(f"{ops.sequence.label} vs {state.sequence.label}")
    v = state.padded(ops.n_max)
    residual = (ops.a @ v - state.z * v)[: ops.n_max - 1]
    return float(np.linalg.norm(residual) / np.linalg.norm(v))


def _check_same(s1: CoherentState, s2: CoherentState) -> None:
    if s1.sequence != s2.sequence:
        raise SequenceMismatch(f"{s1.sequence.label} vs {s2.sequence.label}")


def overlap(s1: CoherentState, s2: CoherentState) -> complex:
    """<q,z|q,z'> = N N' exp_q(conj(z) z') as the shared coefficient sum."""
    _check_same(s1, s2)
    size = max(s1.n_max, s2.n_max)
    return complex(np.vdot(s1.padded(size), s2.padded(size)))


def continuity_gap(s1: CoherentState, s2: CoherentState) -> ContinuityGap:
    _check_same(s1, s2)
    size = max(s1.n_max, s2.n_max)
    diff = s1.padded(size) - s2.padded(size)
    lhs = float(np.vdot(diff, diff).real)
    rhs = 2.0 * (1.0 - overlap(s1, s2).real)
    return ContinuityGap(lhs=lhs, rhs=rhs)


def state_to_json(state: CoherentState) -> dict:
    return {
        "z": [state.z.real, state.z.imag],
        "sequence": state.sequence.label,
        "n_max": state.n_max,
        "norm_const": state.norm_const,
        "coeffs": [[float(c.real), float(c.imag)] for c in state.coeffs],
        "tail_bound": state.tail_bound,
        "terminated": state.terminated,
    }
