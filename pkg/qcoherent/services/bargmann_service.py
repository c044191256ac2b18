"""
bargmann_service.py — analytic symbols, reconstruction and the reproducing
kernel exp_q(conj(z) z').

Every z-plane integral here has the form int d^2z W~(|z|^2) z^k conj(z)^n (...).
The angular integral is pi * delta_kn, which leaves the radial moments
M_n = int x^n W~(x) dx of the weight table. Only those moments are numerical;
the factor pi M_n / [rho_n]! is 1 for an exact weight.
"""
import logging

import numpy as np

from qcoherent.config import settings
from qcoherent.models.bargmann_model import AnalyticSymbol, ExpansionReport
from qcoherent.models.measure_model import WeightTable
from qcoherent.models.qalgebra_model import SpectrumSequence
from qcoherent.services.coherent_service import build_state
from qcoherent.services.measure_service import verify_moments
from qcoherent.services.qalgebra_service import q_factorial
from qcoherent.utils.errors import MomentQualityTooLow, SequenceMismatch

logger = logging.getLogger(__name__)


def make_symbol(amplitudes, sequence: SpectrumSequence) -> AnalyticSymbol:
    symbol = AnalyticSymbol(amplitudes=np.asarray(amplitudes, dtype=complex), sequence=sequence)
    # positivity gate for every level the symbol touches
    q_factorial(sequence, symbol.amplitudes.size - 1)
    return symbol


def to_symbol(amplitudes, sequence: SpectrumSequence, z: complex) -> complex:
    """psi(z) = sum_n z^n <n|psi> / sqrt([rho_n]!); a finite vector has no tail."""
    amps = np.asarray(amplitudes, dtype=complex)
    table = q_factorial(sequence, amps.size - 1)
    powers = complex(z) ** np.arange(amps.size)
    return complex(np.sum(powers * amps / np.sqrt(table.values)))


# ─────────────────────────────────────────────────────────────────
# Moment certification
# ─────────────────────────────────────────────────────────────────

def certify(table: WeightTable, max_level: int, tolerance: float | None = None) -> np.ndarray:
    """
    pi M_n / [rho_n]! for n = 0..max_level, after checking that the moment
    report covers those levels within `tolerance`.
    """
    tolerance = settings.MOMENT_TOLERANCE if tolerance is None else tolerance
    report = table.moment_report
    if report is None or len(report.rows) <= max_level:
        report = verify_moments(table, max_level)
    rows = report.rows[: max_level + 1]
    worst = max(r.rel_error for r in rows)
    if worst > tolerance:
        raise MomentQualityTooLow(worst, tolerance)
    return np.array([r.achieved / r.target for r in rows])


def _check_sequence(symbol: AnalyticSymbol, table: WeightTable) -> None:
    if symbol.sequence != table.sequence:
        raise SequenceMismatch(
            f"symbol on {symbol.sequence.label}, weight on {table.sequence.label}"
        )


# ─────────────────────────────────────────────────────────────────
# Public API
# ─────────────────────────────────────────────────────────────────

def reconstruct(
    symbol: AnalyticSymbol, weight: WeightTable, tolerance: float | None = None,
) -> np.ndarray:
    """|psi> = int d^2z W N psi(conj z) |q,z>, amplitude by amplitude."""
    _check_sequence(symbol, weight)
    factors = certify(weight, symbol.amplitudes.size - 1, tolerance)
    return symbol.amplitudes * factors


def symbol_inner_product(
    psi1: AnalyticSymbol,
    psi2: AnalyticSymbol,
    weight: WeightTable,
    tolerance: float | None = None,
) -> complex:
    """int d^2z W(|z|^2) / exp_q(|z|^2) conj(psi1) psi2."""
    _check_sequence(psi1, weight)
    _check_sequence(psi2, weight)
    size = max(psi1.amplitudes.size, psi2.amplitudes.size)
    a = np.zeros(size, dtype=complex)
    b = np.zeros(size, dtype=complex)
    a[: psi1.amplitudes.size] = psi1.amplitudes
    b[: psi2.amplitudes.size] = psi2.amplitudes
    factors = certify(weight, size - 1, tolerance)
    return complex(np.sum(np.conj(a) * b * factors))


def kernel_reproduce(
    symbol: AnalyticSymbol, weight: WeightTable, z: complex, tolerance: float | None = None,
) -> complex:
    """
    int d^2z' W / exp_q(|z'|^2) exp_q(conj(z) z') psi(conj z'); equals
    to_symbol at conj(z) when the weight is exact.
    """
    _check_sequence(symbol, weight)
    n = symbol.amplitudes.size
    factors = certify(weight, n - 1, tolerance)
    table = q_factorial(symbol.sequence, n - 1)
    powers = np.conj(complex(z)) ** np.arange(n)
    return complex(np.sum(powers * symbol.amplitudes / np.sqrt(table.values) * factors))


def overcompleteness_check(
    z_prime: complex,
    weight: WeightTable,
    tolerance: float | None = None,
    state_tolerance: float | None = None,
) -> ExpansionReport:
    """Expands ||q,z'> over the coherent-state family and compares with the direct state."""
    state = build_state(weight.sequence, z_prime, state_tolerance)
    symbol = make_symbol(state.coeffs, weight.sequence)
    factors = certify(weight, state.n_max - 1, tolerance)
    report = ExpansionReport(
        z=state.z,
        reconstructed=symbol.amplitudes * factors,
        direct=np.array(state.coeffs),
        worst_moment_error=float(np.max(np.abs(factors - 1))),
    )
    logger.info(
        "overcompleteness at z'=%s: %d levels, deviation %.3g",
        state.z, state.n_max, report.deviation,
    )
    return report
