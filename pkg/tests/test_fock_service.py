import math

import numpy as np
import pytest

from qcoherent.models.qalgebra_model import Deformation, SequenceKind, SpectrumSequence
from qcoherent.services.fock_service import (
    build_fmap,
    build_operators,
    mapped_operators,
    operators_to_json,
    verify_delta_relations,
    verify_Q_oscillator,
    verify_qmutator,
)
from qcoherent.services.qalgebra_service import box_values
from qcoherent.utils.errors import NegativeRatio, NotInvertible, PositivityViolation


def _symmetric(theta=None):
    d = Deformation.classical() if theta is None else Deformation.phase(theta)
    return SpectrumSequence.of(SequenceKind.SYMMETRIC, d)


def _basis(n, size):
    v = np.zeros(size, dtype=complex)
    v[n] = 1.0
    return v


# ─────────────────────────────────────────────────────────────────
# Construction
# ─────────────────────────────────────────────────────────────────

def test_lowering_from_first_level():
    ops = build_operators(_symmetric(0.9), 2)
    np.testing.assert_allclose(ops.a @ _basis(1, 2), _basis(0, 2), atol=1e-15)


def test_bosonic_raising(bosonic):
    ops = build_operators(bosonic, 5)
    np.testing.assert_allclose(ops.a_dag @ _basis(2, 5), math.sqrt(3) * _basis(3, 5), atol=1e-15)


def test_delta_is_box_table(sym_pi6):
    ops = build_operators(sym_pi6, 4)
    np.testing.assert_allclose(np.diag(ops.delta).real, [0, 1, math.sqrt(3), 2], atol=1e-14)


def test_adjoint_is_conjugate_transpose_under_gate(sym_pi8):
    ops = build_operators(sym_pi8, 7)
    assert np.array_equal(ops.a_dag, ops.a.conj().T)
    assert not ops.formal_adjoint


def test_number_operator(bosonic):
    ops = build_operators(bosonic, 4)
    np.testing.assert_array_equal(np.diag(ops.number), [0, 1, 2, 3])


def test_gate_rejects_root_of_unity(sym_pi6):
    with pytest.raises(PositivityViolation) as exc:
        build_operators(sym_pi6, 7)
    assert exc.value.n == 6


def test_formal_mode_takes_complex_roots(sym_pi6):
    ops = build_operators(sym_pi6, 9, gate=False)
    assert ops.formal_adjoint
    # box(7) = -1 gives an imaginary matrix element
    assert ops.a[6, 7] == pytest.approx(1j)
    assert np.array_equal(ops.a_dag, ops.a.T)


def test_minimum_dimension(bosonic):
    with pytest.raises(ValueError):
        build_operators(bosonic, 1)


def test_operators_are_read_only(bosonic):
    ops = build_operators(bosonic, 3)
    with pytest.raises(ValueError):
        ops.a[0, 1] = 5.0


def test_json_export_shape(sym_pi6):
    doc = operators_to_json(build_operators(sym_pi6, 3))
    assert doc["n_max"] == 3
    assert len(doc["a"]) == 3 and len(doc["a"][0]) == 3
    assert doc["a"][0][1] == [1.0, 0.0]


# ─────────────────────────────────────────────────────────────────
# Commutation relations
# ─────────────────────────────────────────────────────────────────

def test_bosonic_commutator(bosonic):
    report = verify_qmutator(build_operators(bosonic, 8), 1.0)
    assert report.rows_checked == 7
    assert report.max_residual <= 1e-13


def test_qmutator_at_phase(sym_pi6):
    ops = build_operators(sym_pi6, 5)
    assert verify_qmutator(ops, ops.q).max_residual <= 1e-13


def test_qmutator_negative_control(sym_pi6):
    ops = build_operators(sym_pi6, 5)
    report = verify_qmutator(ops, ops.q, delta_prime=np.eye(5))
    assert report.max_residual > 0.1


@pytest.mark.parametrize("theta", [None, math.pi / 8, math.pi / 12])
def test_sixteen_level_algebra(theta):
    seq = _symmetric(theta)
    ops = build_operators(seq, 16, gate=False)
    assert verify_qmutator(ops, ops.q).max_residual <= 1e-12
    assert verify_Q_oscillator(ops, ops.q).max_residual <= 1e-12


@pytest.mark.parametrize("theta", [math.pi / 8, math.pi / 12])
def test_linear_sequence_with_phase_q(theta):
    seq = SpectrumSequence.of(SequenceKind.LINEAR, Deformation.phase(theta))
    ops = build_operators(seq, 16)
    assert verify_qmutator(ops, ops.q).max_residual <= 1e-12


def test_delta_relations(sym_pi8):
    ops = build_operators(sym_pi8, 7)
    for report in verify_delta_relations(ops, ops.q):
        assert report.max_residual <= 1e-12


def test_Q_oscillator_bosonic_identity():
    ops = build_operators(_symmetric(), 6)
    assert verify_Q_oscillator(ops, 1.0).max_residual <= 1e-13


def test_Q_oscillator_at_phase(sym_pi8):
    ops = build_operators(sym_pi8, 6)
    assert verify_Q_oscillator(ops, ops.q).max_residual <= 1e-12
    assert verify_Q_oscillator(ops, ops.q, sign=-1.0).max_residual > 0.5


def test_residuals_do_not_depend_on_truncation(sym_pi12):
    small = verify_qmutator(build_operators(sym_pi12, 6), sym_pi12.deformation.q)
    large = verify_qmutator(build_operators(sym_pi12, 11), sym_pi12.deformation.q)
    np.testing.assert_allclose(small.row_max, large.row_max[:5], atol=1e-14)
    small_ops = build_operators(sym_pi12, 6)
    large_ops = build_operators(sym_pi12, 11)
    np.testing.assert_array_equal(small_ops.a[:5, :5], large_ops.a[:5, :5])


# ─────────────────────────────────────────────────────────────────
# F-map
# ─────────────────────────────────────────────────────────────────

def test_fmap_matches_native_oscillator(bosonic):
    Q = Deformation.phase(math.pi / 8)
    fmap = build_fmap(bosonic, Q, n_max=12, gate=False)
    ops = build_operators(bosonic, 12, gate=False)
    A, A_dag = mapped_operators(fmap, ops)
    native = build_operators(SpectrumSequence.of(SequenceKind.SYMMETRIC, Q), 12, gate=False)
    np.testing.assert_allclose(A, native.a, atol=1e-12)
    np.testing.assert_allclose(A_dag, native.a_dag, atol=1e-12)
    assert verify_Q_oscillator(ops, Q.q, A=A, A_dag=A_dag).max_residual <= 1e-12


def test_gated_fmap_below_root(bosonic):
    Q = Deformation.phase(math.pi / 8)
    fmap = build_fmap(bosonic, Q, n_max=8)
    ops = build_operators(bosonic, 8)
    A, A_dag = mapped_operators(fmap, ops)
    assert np.all(fmap.f_values.imag == 0)
    assert verify_Q_oscillator(ops, Q.q, A=A, A_dag=A_dag).max_residual <= 1e-12


def test_wrong_alpha_breaks_the_map(bosonic):
    Q = Deformation.phase(math.pi / 8)
    fmap = build_fmap(bosonic, Q, alpha=2.0, n_max=6)
    ops = build_operators(bosonic, 6)
    A, A_dag = mapped_operators(fmap, ops)
    assert verify_Q_oscillator(ops, Q.q, A=A, A_dag=A_dag).max_residual > 0.5


def test_fmap_negative_ratio(bosonic):
    with pytest.raises(NegativeRatio) as exc:
        build_fmap(bosonic, Deformation.phase(math.pi / 8), n_max=12)
    assert exc.value.n == 8


def test_fmap_not_invertible():
    source = _symmetric(math.pi / 4)
    with pytest.raises(NotInvertible) as exc:
        build_fmap(source, Deformation.phase(math.pi / 8), n_max=5)
    assert exc.value.n == 3


def test_mapped_operators_dimension_check(bosonic):
    fmap = build_fmap(bosonic, Deformation.phase(math.pi / 8), n_max=4)
    with pytest.raises(ValueError):
        mapped_operators(fmap, build_operators(bosonic, 5))


@pytest.mark.parametrize("seq, n_max", [
    (SpectrumSequence.of(SequenceKind.LINEAR), 8),
    (_symmetric(math.pi / 12), 10),
    (SpectrumSequence.of(SequenceKind.SYMMETRIC, Deformation.real(1.3)), 10),
    (SpectrumSequence.of(SequenceKind.ARIK_COON, Deformation.real(0.5)), 10),
])
def test_delta_spectrum_is_box_values(seq, n_max):
    ops = build_operators(seq, n_max)
    eigenvalues = np.sort(np.linalg.eigvals(ops.delta).real)
    np.testing.assert_allclose(eigenvalues, np.sort(box_values(seq, n_max - 1)), atol=1e-12)
