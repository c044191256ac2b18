import math

import numpy as np
import pytest

from qcoherent.models.qalgebra_model import Deformation, SequenceKind, SpectrumSequence
from qcoherent.services.qalgebra_service import (
    admissible_levels,
    box_value,
    box_value_complex,
    box_values,
    exp_q,
    exp_q_reciprocal,
    exp_q_series,
    exp_q_sqrt_reciprocal,
    q_factorial,
)
from qcoherent.utils.errors import (
    DivisionByZero,
    InvalidDeformation,
    NoConvergence,
    NonRealValue,
    PositivityViolation,
    PrecisionLoss,
)


# ─────────────────────────────────────────────────────────────────
# Deformation
# ─────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("build", [
    lambda: Deformation.real(1.0),
    lambda: Deformation.real(-0.5),
    lambda: Deformation.phase(0.0),
    lambda: Deformation.phase(math.pi),
    lambda: Deformation.phase(4.0),
])
def test_invalid_deformations_rejected(build):
    with pytest.raises(InvalidDeformation):
        build()


def test_phase_deformation_is_unit_modulus():
    d = Deformation.phase(math.pi / 8)
    assert abs(abs(d.q) - 1) < 1e-14
    assert d.q == pytest.approx(complex(math.cos(math.pi / 8), math.sin(math.pi / 8)))


def test_self_conjugate_flag():
    phase = Deformation.phase(0.3)
    assert SpectrumSequence.of("symmetric", phase).self_conjugate
    assert not SpectrumSequence.of("arik-coon", phase).self_conjugate
    assert SpectrumSequence.of("arik-coon", Deformation.real(0.5)).self_conjugate


# ─────────────────────────────────────────────────────────────────
# Box values
# ─────────────────────────────────────────────────────────────────

def test_symmetric_phase_box(sym_pi6):
    assert box_value(sym_pi6, 3) == pytest.approx(2.0, abs=1e-14)
    assert box_value(sym_pi6, 2) == pytest.approx(math.sqrt(3), abs=1e-14)
    assert box_value(sym_pi6, 0) == 0.0


def test_family_values():
    assert box_value(SpectrumSequence.of("linear"), 5) == 5.0
    assert box_value(SpectrumSequence.of("arik-coon", Deformation.real(2.0)), 3) == pytest.approx(7.0)
    assert box_value(SpectrumSequence.of("symmetric", Deformation.real(2.0)), 2) == pytest.approx(2.5)
    fib = box_values(SpectrumSequence.of("fibonacci"), 7)
    assert fib.tolist() == [0, 1, 1, 2, 3, 5, 8, 13]


def test_classical_kind_gives_integers():
    for kind in ("linear", "arik-coon", "symmetric"):
        seq = SpectrumSequence.of(kind)
        np.testing.assert_array_equal(box_values(seq, 6), np.arange(7.0))


def test_phase_arik_coon_is_not_real():
    seq = SpectrumSequence.of("arik-coon", Deformation.phase(0.4))
    with pytest.raises(NonRealValue):
        box_value(seq, 2)


def test_complex_evaluation_is_real_for_symmetric_phase():
    seq = SpectrumSequence.of("symmetric", Deformation.phase(0.7))
    for n in range(1, 5):
        value = box_value_complex(seq, n)
        assert abs(value.imag) < 1e-12
        assert value.real == pytest.approx(box_value(seq, n), abs=1e-12)


def test_classical_limit_of_real_q():
    seq = SpectrumSequence.of("symmetric", Deformation.real(1 + 1e-6))
    assert box_value(seq, 5) == pytest.approx(5.0, rel=1e-9)


@pytest.mark.parametrize("kind", ["symmetric", "arik-coon"])
@pytest.mark.parametrize("k", range(2, 9))
def test_classical_limit_sweep(kind, k):
    step = 10.0 ** -k
    seq = SpectrumSequence.of(kind, Deformation.real(1 + step))
    assert abs(box_value(seq, 5) - 5.0) <= 125 * step


def test_admissible_levels_at_root_of_unity(sym_pi6, sym_pi12):
    assert admissible_levels(sym_pi6, 40) == 6
    assert admissible_levels(sym_pi12, 40) == 12
    assert admissible_levels(SpectrumSequence.of("linear"), 40) == 40


# ─────────────────────────────────────────────────────────────────
# Factorials
# ─────────────────────────────────────────────────────────────────

def test_q_factorial_values(sym_pi6):
    table = q_factorial(sym_pi6, 3)
    np.testing.assert_allclose(table.values, [1, 1, math.sqrt(3), 2 * math.sqrt(3)], rtol=1e-14)


def test_q_factorial_recurrence_in_log_domain():
    seq = SpectrumSequence.of("symmetric", Deformation.real(1.3))
    table = q_factorial(seq, 30)
    boxes = box_values(seq, 30)
    for n in range(1, 31):
        assert table.log_values[n] == pytest.approx(table.log_values[n - 1] + math.log(boxes[n]), rel=1e-13)


def test_positivity_gate_names_the_level(sym_pi6):
    with pytest.raises(PositivityViolation) as exc:
        q_factorial(sym_pi6, 6)
    assert exc.value.n == 6
    assert q_factorial(sym_pi6, 5).values[5] == pytest.approx(6.0)


def test_factorial_table_is_read_only(sym_pi6):
    table = q_factorial(sym_pi6, 3)
    with pytest.raises(ValueError):
        table.values[0] = 2.0


# ─────────────────────────────────────────────────────────────────
# Deformed exponential
# ─────────────────────────────────────────────────────────────────

def test_bosonic_exponential(bosonic):
    assert exp_q(bosonic, 1.0) == pytest.approx(math.e, abs=1e-12)
    assert exp_q(bosonic, -1.0) == pytest.approx(math.exp(-1), abs=1e-12)
    assert exp_q(bosonic, 0.0) == 1.0


def test_series_record(bosonic):
    s = exp_q_series(bosonic, 2.0, 1e-12)
    assert s.tail_bound < 1e-12
    assert not s.terminated
    assert abs(s.value - math.exp(2)) <= s.tail_bound + 1e-14


def test_phase_series_terminates_at_root_of_unity(sym_pi6):
    s = exp_q_series(sym_pi6, 1.0)
    assert s.terminated
    assert s.order == 5
    assert s.tail_bound == 0.0
    expected = 2 + 1 / math.sqrt(3) + 1 / (2 * math.sqrt(3)) + 2 / 6
    assert s.value.real == pytest.approx(expected, rel=1e-14)


def test_non_additivity(sym_pi6, bosonic):
    assert abs(exp_q(sym_pi6, 1.0) ** 2 - exp_q(sym_pi6, 2.0)) > 1e-6
    assert abs(exp_q(bosonic, 1.0, 1e-13) ** 2 - exp_q(bosonic, 2.0, 1e-13)) < 1e-12


@pytest.mark.parametrize("x", [-4.0, -1.5 + 2j, 3j])
def test_error_bound_covers_cancellation(bosonic, x):
    series = exp_q_series(bosonic, x, 1e-12)
    assert series.rounding_bound > 0
    assert abs(series.value - np.exp(x)) <= series.error_bound


@pytest.mark.parametrize("x", [-30.0, -40.0])
def test_cancellation_beyond_double_precision(bosonic, x):
    # exp(x) is far below the rounding of terms as large as e^|x|
    with pytest.raises(PrecisionLoss) as exc:
        exp_q_series(bosonic, x, 1e-12)
    assert exc.value.rounding > exc.value.limit


def test_reciprocal_is_not_series_at_negative_argument(sym_pi6):
    recip = exp_q_reciprocal(sym_pi6, 1.0)
    assert recip.real == pytest.approx(1 / 3.1993587371177, rel=1e-10)
    assert abs(recip - exp_q(sym_pi6, -1.0)) > 1e-2


@pytest.mark.parametrize("x", [-4.0, -1.5, 0.0, 0.5, 2.0, 4.0])
def test_reciprocal_identity(bosonic, x):
    assert exp_q(bosonic, x) * exp_q_reciprocal(bosonic, x) == pytest.approx(1.0, abs=1e-10)


def test_sqrt_reciprocal(bosonic):
    assert exp_q_sqrt_reciprocal(bosonic, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-12)
    with pytest.raises(ValueError):
        exp_q_sqrt_reciprocal(bosonic, -1.0)


def test_division_by_zero_at_exact_root():
    # theta = pi/2 truncates exp_q to 1 + x
    seq = SpectrumSequence.of("symmetric", Deformation.phase(math.pi / 2))
    assert exp_q(seq, -1.0) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DivisionByZero):
        exp_q_reciprocal(seq, -1.0)


def test_generic_phase_hits_negative_box():
    seq = SpectrumSequence.of("symmetric", Deformation.phase(1.0))
    with pytest.raises(PositivityViolation) as exc:
        exp_q(seq, 1.0)
    assert exc.value.n == 4


def test_budget_exhaustion(bosonic):
    with pytest.raises(NoConvergence):
        exp_q_series(bosonic, 10.0, max_order=5)


def test_series_rejects_non_self_conjugate():
    seq = SpectrumSequence.of("arik-coon", Deformation.phase(0.4))
    with pytest.raises(NonRealValue):
        exp_q(seq, 1.0)
