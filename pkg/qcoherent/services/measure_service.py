"""
measure_service.py — the radial moment problem int x^n W~(x) dx = [rho_n]_q!/pi.

Pipeline for a deformed weight:
  1. W-bar(y) = sum_n [rho_n]_q! (iy)^n / (pi n!), the characteristic function
  2. Gaussian-damped inversion W~_eps(x) = (1/2pi) int exp(-iyx - eps y^2) W-bar(y) dy
  3. one table per epsilon of the ladder, Richardson-extrapolated to eps = 0
  4. moments of the extrapolated table checked against the factorial targets

Grid points are evaluated in chunks, at most MAX_CONCURRENT at a time, and
reassembled in grid order.
"""
import asyncio
import logging
import math
from typing import Callable

import numpy as np
from numpy.polynomial import hermite_e as H
from numpy.polynomial import polynomial as P
from scipy.special import gammaln, log_ndtr

from qcoherent.config import settings
from qcoherent.models.measure_model import (
    MomentReport,
    MomentRow,
    MomentTarget,
    WbarValue,
    WeightMethod,
    WeightTable,
)
from qcoherent.models.qalgebra_model import DeformationKind, SequenceKind, SpectrumSequence
from qcoherent.services.qalgebra_service import admissible_levels, box_values, q_factorial
from qcoherent.utils.errors import (
    Diverges,
    GridTooShort,
    NonDecayingIntegrand,
    NonRealValue,
    PositivityViolation,
    QuadratureFailure,
    SequenceMismatch,
    Unsupported,
)
from qcoherent.utils.quadrature import filon_fourier, moment, richardson_weights

logger = logging.getLogger(__name__)

# frequencies used to decide Filon convergence before the full grid pass
_CHECK_POINTS = 16
# y_cutoff search gives up beyond this
_Y_LIMIT = 1e6
# extra decades kept beyond GRID_TAIL_RATIO when sizing a bosonic grid
_TAIL_MARGIN = math.log(10.0)
# asymptotic terms fitted beyond the ones matched by the edge reference
_EDGE_EXTRA_TERMS = 3
_EDGE_FIT_POINTS = 16


# ─────────────────────────────────────────────────────────────────
# Moment targets
# ─────────────────────────────────────────────────────────────────

def moment_target(sequence: SpectrumSequence, n: int) -> float:
    """[rho_n]_q! / pi."""
    return float(q_factorial(sequence, n).values[n]) / math.pi


def moment_targets(sequence: SpectrumSequence, n_max: int) -> MomentTarget:
    table = q_factorial(sequence, n_max)
    return MomentTarget(sequence=sequence, n_max=n_max, mu=table.values / math.pi)


# ─────────────────────────────────────────────────────────────────
# Characteristic function W-bar
# ─────────────────────────────────────────────────────────────────

def _is_bosonic(sequence: SpectrumSequence) -> bool:
    return (
        sequence.kind is not SequenceKind.FIBONACCI
        and (sequence.kind is SequenceKind.LINEAR
             or sequence.deformation.kind is DeformationKind.CLASSICAL)
    )


def _polynomial_coefficients(sequence: SpectrumSequence) -> np.ndarray:
    """
    c_n = [rho_n]! / (pi n!) for n below the root-of-unity level, where the
    factorials and hence the series stop.
    """
    horizon = admissible_levels(sequence, settings.SERIES_MAX_ORDER + 1)
    if horizon > settings.SERIES_MAX_ORDER:
        raise Unsupported(
            f"{sequence.label}: ladder does not terminate within {settings.SERIES_MAX_ORDER} levels"
        )
    boxes = box_values(sequence, horizon)
    if boxes[horizon] < -settings.ZERO_TOLERANCE:
        # theta is not pi/m: the factorials turn negative instead of vanishing
        raise PositivityViolation(horizon, float(boxes[horizon]))
    table = q_factorial(sequence, horizon - 1)
    n = np.arange(horizon)
    return np.exp(table.log_values - gammaln(n + 1)) / math.pi


def _wbar_plan(sequence: SpectrumSequence) -> np.ndarray | None:
    """None for the bosonic geometric series, else the polynomial coefficients."""
    if sequence.kind is SequenceKind.FIBONACCI:
        raise Unsupported("no weight function is constructed for the Fibonacci sequence")
    if not sequence.self_conjugate:
        raise NonRealValue(f"{sequence.label} is not self-conjugate")
    if _is_bosonic(sequence):
        return None
    if sequence.deformation.kind is DeformationKind.REAL_Q:
        if sequence.kind is SequenceKind.ARIK_COON:
            raise Unsupported("the real-q Arik-Coon measure is not constructed here")
        raise Diverges(
            f"{sequence.label}: factorials grow super-exponentially, W-bar has zero radius"
        )
    return _polynomial_coefficients(sequence)


def wbar_series(sequence: SpectrumSequence, y: float, order: int | None = None) -> WbarValue:
    """
    Partial sum of sum_n [rho_n]! (iy)^n / (pi n!) through `order`.

    The bosonic series is geometric and converges only for |y| < 1; outside
    it the analytic continuation 1/(pi (1 - iy)) is returned (resummed=True).
    For a phase q the series is a polynomial, so any order past its degree is exact.
    """
    coeffs = _wbar_plan(sequence)
    order = settings.SERIES_MAX_ORDER if order is None else order
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    y = float(y)

    if coeffs is None:
        if abs(y) >= 1:
            with np.errstate(over="ignore"):
                last = float(np.power(abs(y), order, dtype=float)) / math.pi
            return WbarValue(value=1 / (math.pi * (1 - 1j * y)), order=order,
                             last_term=last, resummed=True)
        terms = (1j * y) ** np.arange(order + 1) / math.pi
        return WbarValue(value=complex(terms.sum()), order=order,
                         last_term=float(abs(terms[-1])))

    order = min(order, coeffs.size - 1)
    terms = coeffs[: order + 1] * (1j * y) ** np.arange(order + 1)
    return WbarValue(value=complex(terms.sum()), order=order, last_term=float(abs(terms[-1])))


def _wbar_function(coeffs: np.ndarray | None) -> Callable[[np.ndarray], np.ndarray]:
    if coeffs is None:
        return lambda y: 1 / (np.pi * (1 - 1j * y))
    return lambda y: P.polyval(1j * y, coeffs)


def _y_cutoff(
    wbar: Callable[[np.ndarray], np.ndarray], epsilon: float, threshold: float, label: str,
) -> float:
    def damped(y: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(-epsilon * y * y) * np.abs(wbar(y))

    span = 1.0
    while span <= _Y_LIMIT:
        outer = damped(np.linspace(span, 2 * span, 257))
        if np.all(np.isfinite(outer)) and np.all(outer < threshold):
            ys = np.linspace(0.0, 2 * span, 8193)
            above = np.nonzero(~(damped(ys) < threshold))[0]
            return float(ys[above[-1] + 1]) if above.size else float(ys[1])
        span *= 2
    raise NonDecayingIntegrand(
        f"{label}: damped W-bar stays above {threshold:g} up to |y| = {_Y_LIMIT:g} "
        f"at eps = {epsilon:g}"
    )


def find_y_cutoff(
    sequence: SpectrumSequence, epsilon: float, threshold: float | None = None,
) -> float:
    """Smallest sampled Y with exp(-eps y^2) |W-bar(y)| < threshold for all |y| >= Y."""
    threshold = settings.CUTOFF_THRESHOLD if threshold is None else threshold
    return _y_cutoff(_wbar_function(_wbar_plan(sequence)), epsilon, threshold, sequence.label)


# ─────────────────────────────────────────────────────────────────
# Edge correction
# ─────────────────────────────────────────────────────────────────
#
# A weight supported on x >= 0 with W(0+) != 0 jumps at the origin, and
# Gaussian smoothing spreads the jump over a few sqrt(2 eps). The edge
# values W^(j)(0+), j < K, are read off the large-|y| expansion
#   W-bar(y) ~ sum_k c_k (iy)^-k,   c_{j+1} = (-1)^(j+1) W^(j)(0+),
# and carried by a reference R(x) = exp(-r x) sum_k b_k x^(k-1)/(k-1)!
# whose transform sum_k b_k / (r - iy)^k is exact. Only W - R, which is
# C^(K-1) at the origin, goes through the regularized inversion.

def _fit_edge(wbar: Callable[[np.ndarray], np.ndarray], terms: int) -> np.ndarray:
    y0 = settings.EDGE_FIT_START
    ys = np.geomspace(y0, 4 * y0, _EDGE_FIT_POINTS)
    y = np.concatenate((-ys[::-1], ys))
    k = np.arange(1, terms + _EDGE_EXTRA_TERMS + 1)
    basis = (y0 / (1j * y))[:, None] ** k
    scaled, *_ = np.linalg.lstsq(basis, wbar(y), rcond=None)
    return (scaled[:terms] / y0 ** k[:terms]).real


def edge_coefficients(sequence: SpectrumSequence, terms: int) -> np.ndarray:
    """c_1..c_terms of the large-|y| expansion of W-bar (real for a real weight)."""
    if terms < 1:
        raise ValueError(f"terms must be positive, got {terms}")
    coeffs = _wbar_plan(sequence)
    if coeffs is not None:
        raise Unsupported(f"{sequence.label}: W-bar is a polynomial with no decaying expansion")
    return _fit_edge(_wbar_function(None), terms)


def edge_reference(c: np.ndarray, rate: float | None = None) -> np.ndarray:
    """
    b_1..b_K such that sum_k b_k / (rate - iy)^k has the expansion
    coefficients c_1..c_K, from (r - u)^-k = (-1)^k sum_m C(k+m-1, m) r^m u^-(k+m).
    """
    rate = settings.EDGE_DECAY_RATE if rate is None else float(rate)
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    c = np.asarray(c, dtype=float)
    size = c.size
    system = np.zeros((size, size))
    for p in range(1, size + 1):
        for k in range(1, p + 1):
            system[p - 1, k - 1] = (-1) ** k * math.comb(p - 1, p - k) * rate ** (p - k)
    return np.linalg.solve(system, c)


def _reference_wbar(b: np.ndarray, rate: float) -> Callable[[np.ndarray], np.ndarray]:
    def transform(y: np.ndarray) -> np.ndarray:
        base = rate - 1j * np.asarray(y, dtype=float)
        return sum(bk / base ** (k + 1) for k, bk in enumerate(b))
    return transform


def reference_weight(b: np.ndarray, x: np.ndarray, rate: float | None = None) -> np.ndarray:
    """exp(-rate x) sum_k b_k x^(k-1)/(k-1)! on x >= 0, zero below."""
    rate = settings.EDGE_DECAY_RATE if rate is None else float(rate)
    x = np.asarray(x, dtype=float)
    poly = np.asarray(b, dtype=float) / np.array([math.factorial(k) for k in range(len(b))])
    inside = np.clip(x, 0.0, None)
    return np.where(x >= 0, np.exp(-rate * inside) * P.polyval(inside, poly), 0.0)


# ─────────────────────────────────────────────────────────────────
# Grids and chunked evaluation
# ─────────────────────────────────────────────────────────────────

def build_grid(
    x_max: float | None = None, points: int | None = None, epsilon: float | None = None,
) -> np.ndarray:
    """
    Graded grid: a uniform dense panel [-pad, GRID_DENSE_EXTENT] holding
    GRID_DENSE_FRACTION of the points, then a uniform coarse panel to x_max.
    pad = GRID_PAD_SIGMAS * sqrt(2 eps) covers the Gaussian spill below zero.
    """
    x_max = settings.GRID_X_MAX if x_max is None else float(x_max)
    points = settings.GRID_POINTS if points is None else int(points)
    epsilon = max(settings.EPSILON_LADDER) if epsilon is None else float(epsilon)
    if x_max <= 0:
        raise ValueError(f"x_max must be positive, got {x_max}")
    if points < 3:
        raise ValueError(f"need at least 3 grid points, got {points}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")

    pad = settings.GRID_PAD_SIGMAS * math.sqrt(2 * epsilon)
    dense_end = min(settings.GRID_DENSE_EXTENT, x_max)
    n_dense = max(2, int(points * settings.GRID_DENSE_FRACTION))
    if dense_end >= x_max or n_dense >= points:
        return np.linspace(-pad, x_max, points)
    dense = np.linspace(-pad, dense_end, n_dense)
    coarse = np.linspace(dense_end, x_max, points - n_dense + 1)[1:]
    return np.concatenate((dense, coarse))


def bosonic_grid_extent(n_check: int) -> float:
    """
    Upper end where x^n e^{-x} has fallen below GRID_TAIL_RATIO of its peak
    for every n <= n_check (never below GRID_X_MAX).
    """
    limit = math.log(settings.GRID_TAIL_RATIO) - _TAIL_MARGIN
    x = max(settings.GRID_X_MAX, float(n_check))
    for n in range(n_check + 1):
        peak = n * math.log(n) - n if n > 0 else 0.0
        while (n * math.log(x) if n > 0 else 0.0) - x > peak + limit:
            x += 0.5
    return x


def extended_point_count(x_max: float) -> int:
    """Point count that keeps the default coarse spacing on a grid stretched to x_max."""
    coarse = settings.GRID_POINTS - int(settings.GRID_POINTS * settings.GRID_DENSE_FRACTION)
    spacing = (settings.GRID_X_MAX - settings.GRID_DENSE_EXTENT) / coarse
    extra = max(0.0, x_max - settings.GRID_X_MAX)
    return settings.GRID_POINTS + math.ceil(extra / spacing)


async def _evaluate_chunks(fn: Callable[[np.ndarray], np.ndarray], grid: np.ndarray) -> np.ndarray:
    chunks = [grid[i:i + settings.CHUNK_SIZE] for i in range(0, grid.size, settings.CHUNK_SIZE)]
    total = len(chunks)
    semaphore = asyncio.Semaphore(settings.MAX_CONCURRENT)

    async def run_one(index: int, chunk: np.ndarray) -> np.ndarray:
        async with semaphore:
            out = await asyncio.to_thread(fn, chunk)
        logger.debug("chunk %d/%d evaluated", index + 1, total)
        return out

    results = await asyncio.gather(*(run_one(i, c) for i, c in enumerate(chunks)))
    return np.concatenate(results)


def evaluate_on_grid(fn: Callable[[np.ndarray], np.ndarray], grid: np.ndarray) -> np.ndarray:
    """
    fn applied chunk-wise; the result is in grid order regardless of completion order.
    Called from inside a running event loop the chunks are evaluated one after
    another in the calling thread.
    """
    grid = np.asarray(grid, dtype=float)
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return asyncio.run(_evaluate_chunks(fn, grid))
    logger.debug("event loop already running; evaluating %d points sequentially", grid.size)
    chunks = range(0, grid.size, settings.CHUNK_SIZE)
    return np.concatenate([fn(grid[i:i + settings.CHUNK_SIZE]) for i in chunks])


# ─────────────────────────────────────────────────────────────────
# Regularized inversion
# ─────────────────────────────────────────────────────────────────

def _invert_by_monomials(coeffs: np.ndarray, grid: np.ndarray, epsilon: float) -> np.ndarray:
    """
    (1/2pi) int exp(-iyx - eps y^2) (iy)^n dy = He_n(x/s) G_s(x) / s^n with
    s^2 = 2 eps and G_s the centred normal density.

    The terms reach ~eps^(-n/2) near x = 0 while their integrals cancel, so
    the Hermite series is summed in extended precision and rounded once.
    """
    s = np.longdouble(math.sqrt(2 * epsilon))
    scaled = coeffs.astype(np.longdouble) / s ** np.arange(coeffs.size)
    norm = s * np.sqrt(2 * np.pi, dtype=np.longdouble)

    def chunk_values(x: np.ndarray) -> np.ndarray:
        u = np.asarray(x, dtype=np.longdouble) / s
        density = np.exp(-u * u / 2) / norm
        return (H.hermeval(u, scaled) * density).astype(float)

    return evaluate_on_grid(chunk_values, grid)


def _invert_by_quadrature(
    wbar: Callable[[np.ndarray], np.ndarray], grid: np.ndarray, epsilon: float, y_cutoff: float,
) -> np.ndarray:
    """Filon's rule on [-Y, Y], doubling the panel count until the sampled values settle."""

    def samples(panels: int) -> tuple[np.ndarray, float]:
        y = np.linspace(-y_cutoff, y_cutoff, panels + 1)
        return np.exp(-epsilon * y * y) * wbar(y), 2 * y_cutoff / panels

    stride = max(1, grid.size // _CHECK_POINTS)
    checks = np.append(grid[::stride], grid[-1])

    panels = settings.QUAD_START_PANELS
    previous = None
    change = math.inf
    while True:
        f, dy = samples(panels)
        current = filon_fourier(f, -y_cutoff, dy, checks) / (2 * math.pi)
        if previous is not None:
            change = float(np.max(np.abs(current - previous)))
            if change < settings.QUAD_TOLERANCE:
                break
        if panels * 2 > settings.QUAD_MAX_PANELS:
            raise QuadratureFailure(panels, change)
        previous = current
        panels *= 2

    logger.info("Filon converged at %d panels (eps=%g, Y=%.4g)", panels, epsilon, y_cutoff)
    f, dy = samples(panels)
    return evaluate_on_grid(
        lambda x: filon_fourier(f, -y_cutoff, dy, x) / (2 * math.pi), grid,
    )


def invert_weight(
    sequence: SpectrumSequence,
    grid: np.ndarray,
    epsilon: float,
    y_cutoff: float | None = None,
    order: int | None = None,
    edge_terms: int = 0,
) -> WeightTable:
    """
    W~_eps on the grid. A polynomial W-bar (phase q) is transformed term by
    term in closed form; the resummed bosonic W-bar goes through Filon.

    With edge_terms = K > 0 the quadrature branch smooths only W - R, where
    the reference R matches the first K one-sided derivatives of W at x = 0,
    and adds R back unsmoothed. The table then is no longer W~_eps itself,
    but it converges to W as eps -> 0 up to the origin. Polynomial W-bar
    ignores edge_terms.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if edge_terms < 0:
        raise ValueError(f"edge_terms must be non-negative, got {edge_terms}")
    grid = np.asarray(grid, dtype=float)
    coeffs = _wbar_plan(sequence)
    wbar = _wbar_function(coeffs)

    reference = None
    if coeffs is None and edge_terms > 0:
        rate = settings.EDGE_DECAY_RATE
        reference = edge_reference(_fit_edge(wbar, edge_terms), rate)
        reference_wbar = _reference_wbar(reference, rate)
        full_wbar = wbar

        def wbar(y: np.ndarray) -> np.ndarray:
            return full_wbar(y) - reference_wbar(y)

        logger.debug("%s: edge reference b=%s", sequence.label, np.array2string(reference, precision=6))
    else:
        edge_terms = 0

    if y_cutoff is None:
        y_cutoff = _y_cutoff(wbar, epsilon, settings.CUTOFF_THRESHOLD, sequence.label)
    else:
        tail = np.linspace(y_cutoff, 4 * y_cutoff, 1025)
        damped = np.exp(-epsilon * tail * tail) * np.abs(wbar(tail))
        if not np.all(damped < settings.CUTOFF_THRESHOLD):
            raise NonDecayingIntegrand(
                f"damped W-bar reaches {float(np.max(damped)):.3g} beyond y_cutoff={y_cutoff:g}"
            )

    if coeffs is not None:
        if order is not None:
            coeffs = coeffs[: order + 1]
        raw = _invert_by_monomials(coeffs, grid, epsilon)
        method, series_order = WeightMethod.MONOMIAL, coeffs.size - 1
    else:
        raw = _invert_by_quadrature(wbar, grid, epsilon, y_cutoff)
        if reference is not None:
            raw = raw + reference_weight(reference, grid)
        method, series_order = WeightMethod.QUADRATURE, order

    values = np.real(raw)
    imag = np.max(np.abs(np.imag(raw))) if np.iscomplexobj(raw) else 0.0
    scale = float(np.max(np.abs(values)))
    imag_residue = float(imag) / scale if scale > 0 else 0.0
    if imag_residue > 1e-8:
        logger.warning("inversion at eps=%g has imaginary residue %.3g", epsilon, imag_residue)

    return WeightTable(
        sequence=sequence,
        grid=grid,
        values=values,
        method=method,
        epsilon=epsilon,
        y_cutoff=y_cutoff,
        series_order=series_order,
        imag_residue=imag_residue,
        edge_terms=edge_terms,
    )


def weight_ladder(
    sequence: SpectrumSequence,
    grid: np.ndarray | None = None,
    epsilons: list[float] | None = None,
    order: int | None = None,
    edge_terms: int | None = None,
) -> list[WeightTable]:
    """One regularized table per epsilon, all on one common grid."""
    epsilons = list(settings.EPSILON_LADDER if epsilons is None else epsilons)
    edge_terms = settings.EDGE_TERMS if edge_terms is None else edge_terms
    if grid is None:
        grid = build_grid(epsilon=max(epsilons))
    tables = []
    for eps in epsilons:
        tables.append(invert_weight(sequence, grid, eps, order=order, edge_terms=edge_terms))
        logger.info("%s: weight at eps=%g done", sequence.label, eps)
    return tables


def extrapolate_weight(tables: list[WeightTable]) -> WeightTable:
    """Richardson extrapolation of the ladder to eps = 0, pointwise on the common grid."""
    if not tables:
        raise ValueError("no tables to extrapolate")
    first = tables[0]
    for t in tables[1:]:
        if t.sequence != first.sequence:
            raise SequenceMismatch(f"{t.sequence.label} vs {first.sequence.label}")
        if t.grid.shape != first.grid.shape or not np.array_equal(t.grid, first.grid):
            raise ValueError("ladder tables must share one grid")
        if t.edge_terms != first.edge_terms:
            raise ValueError("ladder tables must share one edge treatment")

    epsilons = [t.epsilon for t in tables]
    weights = richardson_weights(epsilons)
    values = sum(w * t.values for w, t in zip(weights, tables))
    return WeightTable(
        sequence=first.sequence,
        grid=first.grid,
        values=values,
        method=WeightMethod.EXTRAPOLATED,
        y_cutoff=max(t.y_cutoff or 0.0 for t in tables),
        series_order=first.series_order,
        imag_residue=max(t.imag_residue for t in tables),
        ladder=epsilons,
        edge_terms=first.edge_terms,
    )


# ─────────────────────────────────────────────────────────────────
# Moment verification
# ─────────────────────────────────────────────────────────────────

def verify_moments(table: WeightTable, n_check: int) -> MomentReport:
    """
    int x^n W~(x) dx for n = 0..n_check by composite Simpson on the table
    grid, against [rho_n]!/pi. GridTooShort when the integrand at the last
    grid point is above GRID_TAIL_RATIO of its peak.
    """
    if n_check < 0:
        raise ValueError(f"n_check must be non-negative, got {n_check}")
    targets = moment_targets(table.sequence, n_check).mu
    rows = []
    for n in range(n_check + 1):
        integrand = np.abs(table.grid ** n * table.values)
        peak = float(integrand.max())
        if peak > 0 and integrand[-1] > settings.GRID_TAIL_RATIO * peak:
            raise GridTooShort(n, float(integrand[-1]) / peak)
        achieved = moment(table.grid, table.values, n)
        target = float(targets[n])
        rows.append(MomentRow(
            n=n, achieved=achieved, target=target, rel_error=abs(achieved - target) / target,
        ))
    report = MomentReport(rows=rows)
    logger.info(
        "%s (%s): moments 0..%d, worst rel error %.3g",
        table.sequence.label, table.method.value, n_check, report.max_rel_error,
    )
    return report


# ─────────────────────────────────────────────────────────────────
# Bosonic oracles
# ─────────────────────────────────────────────────────────────────

def bosonic_weight(x: float | np.ndarray) -> float | np.ndarray:
    """e^{-x}/pi for x >= 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("bosonic weight is defined for x >= 0")
    out = np.exp(-arr) / np.pi
    return float(out) if out.ndim == 0 else out


def regularized_bosonic_weight(x: float | np.ndarray, epsilon: float) -> float | np.ndarray:
    """
    e^{-x}/pi on x >= 0 smoothed by the centred normal of variance 2 eps:
    e^{eps - x} Phi((x - 2 eps)/sqrt(2 eps)) / pi.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    arr = np.asarray(x, dtype=float)
    s = math.sqrt(2 * epsilon)
    out = np.exp(epsilon - arr + log_ndtr((arr - 2 * epsilon) / s)) / np.pi
    return float(out) if out.ndim == 0 else out


def bosonic_table(grid: np.ndarray, sequence: SpectrumSequence | None = None) -> WeightTable:
    grid = np.asarray(grid, dtype=float)
    values = np.where(grid >= 0, np.exp(-np.clip(grid, 0.0, None)) / np.pi, 0.0)
    return WeightTable(
        sequence=sequence or SpectrumSequence.of(SequenceKind.LINEAR),
        grid=grid,
        values=values,
        method=WeightMethod.CLOSED_FORM,
    )


def regularized_bosonic_table(grid: np.ndarray, epsilon: float) -> WeightTable:
    grid = np.asarray(grid, dtype=float)
    return WeightTable(
        sequence=SpectrumSequence.of(SequenceKind.LINEAR),
        grid=grid,
        values=np.asarray(regularized_bosonic_weight(grid, epsilon)),
        method=WeightMethod.REGULARIZED_CLOSED_FORM,
        epsilon=epsilon,
    )


# ─────────────────────────────────────────────────────────────────
# Public API: certified weight for a sequence
# ─────────────────────────────────────────────────────────────────

def resolve_weight(
    sequence: SpectrumSequence,
    n_check: int,
    x_max: float | None = None,
    points: int | None = None,
    epsilons: list[float] | None = None,
    regularized: bool = False,
) -> WeightTable:
    """
    Weight table with its moment report attached.
    Bosonic sequences use the closed form on a grid long enough for n_check
    unless `regularized` forces the inversion ladder.
    """
    epsilons = list(settings.EPSILON_LADDER if epsilons is None else epsilons)
    _wbar_plan(sequence)

    if _is_bosonic(sequence) and not regularized:
        extent = bosonic_grid_extent(n_check) if x_max is None else x_max
        if points is None:
            points = extended_point_count(extent)
        table = bosonic_table(build_grid(extent, points, epsilon=0.0), sequence)
    else:
        grid = build_grid(x_max, points, epsilon=max(epsilons))
        table = extrapolate_weight(weight_ladder(sequence, grid, epsilons))
    return table.with_report(verify_moments(table, n_check))
