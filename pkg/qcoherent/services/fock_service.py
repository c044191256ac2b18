"""
fock_service.py — truncated matrix realizations of the deformed oscillator
algebras and their residual checks.

Truncation edge policy: the top level |n_max-1> cannot satisfy the ladder
relations in a finite matrix, so every residual skips the last row.
"""
import logging

import numpy as np

from qcoherent.config import settings
from qcoherent.models.fock_model import FMap, FockOperatorSet, ResidualReport
from qcoherent.models.qalgebra_model import Deformation, SequenceKind, SpectrumSequence
from qcoherent.services.qalgebra_service import box_values, first_nonpositive
from qcoherent.utils.errors import NegativeRatio, NotInvertible, PositivityViolation

logger = logging.getLogger(__name__)


def _ladder(boxes: np.ndarray, n_max: int) -> np.ndarray:
    """Annihilation matrix from box values 0..n_max-1 (principal square roots)."""
    roots = np.sqrt(boxes[1:n_max].astype(complex))
    return np.diag(roots, k=1)


def build_operators(sequence: SpectrumSequence, n_max: int, gate: bool = True) -> FockOperatorSet:
    """
    a|n> = sqrt([rho_n]) |n-1>, a+ = a^T, Delta = a+ a,
    Delta' = diag([rho_{n+1}] - q [rho_n]).

    gate=False admits non-positive boxes; entries become complex and a+ is
    the formal (unconjugated) adjoint.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    boxes = box_values(sequence, n_max)
    if gate:
        n_bad = first_nonpositive(sequence, n_max)
        if n_bad is not None:
            raise PositivityViolation(n_bad, float(boxes[n_bad]))

    q = sequence.deformation.q
    a = _ladder(boxes, n_max)
    a_dag = a.T.copy()
    delta = a_dag @ a
    delta_prime = np.diag(boxes[1:n_max + 1] - q * boxes[:n_max]).astype(complex)
    number = np.diag(np.arange(n_max))

    logger.debug("built %d-level operators for %s (gate=%s)", n_max, sequence.label, gate)
    return FockOperatorSet(
        sequence=sequence,
        n_max=n_max,
        a=a,
        a_dag=a_dag,
        delta=delta,
        delta_prime=delta_prime,
        number=number,
        formal_adjoint=not gate,
    )


# ─────────────────────────────────────────────────────────────────
# Residual checks
# ─────────────────────────────────────────────────────────────────

def _report(relation: str, residual: np.ndarray) -> ResidualReport:
    rows = residual.shape[0] - 1
    row_max = np.abs(residual[:rows]).max(axis=1) if rows > 0 else np.zeros(0)
    return ResidualReport(relation=relation, rows_checked=rows, row_max=row_max.tolist())


def verify_qmutator(
    ops: FockOperatorSet, q: complex, delta_prime: np.ndarray | None = None,
) -> ResidualReport:
    """[a, a+]_q = a a+ - q a+ a = Delta'_q, rows 0..n_max-2."""
    dp = ops.delta_prime if delta_prime is None else delta_prime
    residual = ops.a @ ops.a_dag - q * (ops.a_dag @ ops.a) - dp
    return _report("a a+ - q a+ a = Delta'", residual)


def verify_delta_relations(ops: FockOperatorSet, q: complex) -> list[ResidualReport]:
    """[a, Delta]_q = Delta' a and [Delta, a+]_q = a+ Delta'."""
    a, a_dag, d, dp = ops.a, ops.a_dag, ops.delta, ops.delta_prime
    lower = a @ d - q * (d @ a) - dp @ a
    upper = d @ a_dag - q * (a_dag @ d) - a_dag @ dp
    return [
        _report("a Delta - q Delta a = Delta' a", lower),
        _report("Delta a+ - q a+ Delta = a+ Delta'", upper),
    ]


def q_power_number(ops: FockOperatorSet, Q: complex, exponent: int = -1) -> np.ndarray:
    """Diagonal Q^(exponent * N)."""
    n = np.arange(ops.n_max)
    return np.diag(complex(Q) ** (exponent * n))


def verify_Q_oscillator(
    ops: FockOperatorSet,
    Q: complex,
    A: np.ndarray | None = None,
    A_dag: np.ndarray | None = None,
    sign: float = 1.0,
) -> ResidualReport:
    """
    A A+ - Q A+ A = Q^-N on rows 0..n_max-2. A/A+ default to the operators'
    own ladder; sign=-1 flips Q^-N (negative control).
    """
    A = ops.a if A is None else A
    A_dag = ops.a_dag if A_dag is None else A_dag
    residual = A @ A_dag - Q * (A_dag @ A) - sign * q_power_number(ops, Q)
    return _report("A A+ - Q A+ A = Q^-N", residual)


# ─────────────────────────────────────────────────────────────────
# F-map onto the Q-oscillator
# ─────────────────────────────────────────────────────────────────

def build_fmap(
    source: SpectrumSequence,
    target_Q: Deformation,
    alpha: complex = 1.0,
    n_max: int = 8,
    gate: bool = True,
) -> FMap:
    """
    f_n = sqrt([n+1]_Q / [rho_{n+1}]_q), n = 0..n_max-1, so that F^2 equals
    [N+1]_Q [rho_{N+1}]_q^-1. Requires every [rho_{n+1}]_q to be invertible.
    """
    target = SpectrumSequence(kind=SequenceKind.SYMMETRIC, deformation=target_Q)
    rho = box_values(source, n_max)[1:]
    q_box = box_values(target, n_max)[1:]

    zero = np.nonzero(np.abs(rho) <= settings.ZERO_TOLERANCE)[0]
    if zero.size:
        n = int(zero[0])
        raise NotInvertible(n, float(rho[n]))

    ratio = q_box / rho
    negative = np.nonzero(ratio < -settings.ZERO_TOLERANCE)[0]
    if gate and negative.size:
        n = int(negative[0])
        raise NegativeRatio(n, float(ratio[n]))

    if gate:
        ratio = np.clip(ratio, 0.0, None)
    f_values = np.sqrt(ratio.astype(complex))
    return FMap(
        alpha=complex(alpha),
        f=np.diag(f_values),
        f_values=f_values,
        target_Q=target_Q,
        source=source,
    )


def mapped_operators(fmap: FMap, ops: FockOperatorSet) -> tuple[np.ndarray, np.ndarray]:
    """(A, A+) = (F a, alpha a+ F)."""
    if ops.n_max != fmap.f.shape[0]:
        raise ValueError(f"F has dimension {fmap.f.shape[0]}, operators {ops.n_max}")
    return fmap.f @ ops.a, fmap.alpha * (ops.a_dag @ fmap.f)


# ─────────────────────────────────────────────────────────────────
# Export
# ─────────────────────────────────────────────────────────────────

def _matrix_pairs(m: np.ndarray) -> list[list[list[float]]]:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def operators_to_json(ops: FockOperatorSet) -> dict:
    """Row-major [re, im] pairs for every matrix of the set."""
    return {
        "sequence": ops.sequence.label,
        "n_max": ops.n_max,
        "formal_adjoint": ops.formal_adjoint,
        "a": _matrix_pairs(ops.a),
        "a_dag": _matrix_pairs(ops.a_dag),
        "delta": _matrix_pairs(ops.delta),
        "delta_prime": _matrix_pairs(ops.delta_prime),
        "number": _matrix_pairs(ops.number),
    }
