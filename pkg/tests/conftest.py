import math

import pytest

from qcoherent.models.qalgebra_model import Deformation, SequenceKind, SpectrumSequence
from qcoherent.services.measure_service import (
    build_grid,
    extrapolate_weight,
    resolve_weight,
    weight_ladder,
)


@pytest.fixture
def bosonic():
    return SpectrumSequence.of(SequenceKind.LINEAR)


@pytest.fixture
def sym_pi6():
    return SpectrumSequence.of(SequenceKind.SYMMETRIC, Deformation.phase(math.pi / 6))


@pytest.fixture
def sym_pi8():
    return SpectrumSequence.of(SequenceKind.SYMMETRIC, Deformation.phase(math.pi / 8))


@pytest.fixture
def sym_pi12():
    return SpectrumSequence.of(SequenceKind.SYMMETRIC, Deformation.phase(math.pi / 12))


# ─── expensive weight tables, built once per session ─────────────

@pytest.fixture(scope="session")
def bosonic_weight_table():
    """Closed-form e^{-x}/pi, certified through n = 24."""
    return resolve_weight(SpectrumSequence.of(SequenceKind.LINEAR), 24)


@pytest.fixture(scope="session")
def phase_weight_table():
    """theta = pi/12, epsilon ladder extrapolated, certified on all 12 levels."""
    seq = SpectrumSequence.of(SequenceKind.SYMMETRIC, Deformation.phase(math.pi / 12))
    return resolve_weight(seq, 11)


@pytest.fixture(scope="session")
def bosonic_ladder():
    """Edge-corrected Filon inversions of the resummed bosonic W-bar on a short grid."""
    seq = SpectrumSequence.of(SequenceKind.LINEAR)
    grid = build_grid(x_max=8.0, points=513, epsilon=1e-2)
    tables = weight_ladder(seq, grid)
    return tables, extrapolate_weight(tables)
