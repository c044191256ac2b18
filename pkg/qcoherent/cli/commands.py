"""
commands.py — command-line subcommands and dispatch.

  qnum            box value [rho_n]_q
  expq            deformed exponential with its truncation record
  dump-ops        truncated ladder matrices
  verify-algebra  deformed commutation relations and the F-map
  coherent        normalized coherent state and its eigen residual
  overlap         overlap and continuity identity (random pairs without --z2)
  weight          weight table (CSV) or its moment report (JSON)
  verify-unity    moment certification of the resolution of unity
  bargmann        analytic symbol, reproducing kernel, overcompleteness

Exit codes: 0 success, 1 a verification exceeded --tol or a numerical failure,
2 invalid input.
"""
import argparse
import logging
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from pydantic import ValidationError

from qcoherent import __version__
from qcoherent.config import settings
from qcoherent.models.qalgebra_model import SequenceKind, SpectrumSequence
from qcoherent.models.report_model import CommandReport, OutputFormat, RunConfig, RunMetadata
from qcoherent.services.bargmann_service import (
    kernel_reproduce,
    make_symbol,
    overcompleteness_check,
    symbol_inner_product,
    to_symbol,
)
from qcoherent.services.coherent_service import (
    build_state,
    continuity_gap,
    eigen_residual,
    overlap,
    state_to_json,
)
from qcoherent.services.export_service import (
    emit,
    moment_report_json,
    moment_rows,
    render_csv,
    render_json,
    weight_rows,
)
from qcoherent.services.fock_service import (
    build_fmap,
    build_operators,
    mapped_operators,
    operators_to_json,
    verify_delta_relations,
    verify_Q_oscillator,
    verify_qmutator,
)
from qcoherent.services.measure_service import resolve_weight
from qcoherent.services.qalgebra_service import box_value, exp_q_series
from qcoherent.utils.errors import QAlgebraError
from qcoherent.utils.number_utils import format_float, parse_complex, parse_float_list, sample_disk

logger = logging.getLogger(__name__)

# default --tol per verifying command
ALGEBRA_TOLERANCE    = 1e-12
CONTINUITY_TOLERANCE = 1e-10
RANDOM_PAIRS         = 100
RANDOM_RADIUS        = 2.0
# absolute slack on the coherent eigen residual, over 10x the tail bound
RESIDUAL_FLOOR       = 1e-12

# flags whose values may start with "-" (complex literals such as -0.2+0.5j)
_COMPLEX_FLAGS = ("--z", "--z2", "--x", "--alpha")


@dataclass
class Outcome:
    results: dict
    passed: bool = True
    text: str | None = None                         # bare output when no --format is given
    table: tuple[list[str], list[list]] | None = None  # CSV header and rows
    seed: int | None = None


# ─────────────────────────────────────────────────────────────────
# Handlers
# ─────────────────────────────────────────────────────────────────

def _qnum(cfg: RunConfig) -> Outcome:
    value = box_value(cfg.spectrum, cfg.n)
    return Outcome(
        results={"sequence": cfg.spectrum.label, "n": cfg.n, "value": value},
        text=format_float(value) + "\n",
    )


def _expq(cfg: RunConfig) -> Outcome:
    x = parse_complex(cfg.x)
    series = exp_q_series(cfg.spectrum, x, cfg.tol, max_order=cfg.order)
    return Outcome(results={
        "sequence": cfg.spectrum.label,
        "x": x,
        "value": series.value,
        "order": series.order,
        "tail_bound": series.tail_bound,
        "rounding_bound": series.rounding_bound,
        "terminated": series.terminated,
    })


def _dump_ops(cfg: RunConfig) -> Outcome:
    ops = build_operators(cfg.spectrum, cfg.n_max, gate=not cfg.formal)
    return Outcome(results=operators_to_json(ops))


def _verify_algebra(cfg: RunConfig) -> Outcome:
    tol = ALGEBRA_TOLERANCE if cfg.tol is None else cfg.tol
    gate = not cfg.formal
    seq = cfg.spectrum
    deformation = seq.deformation
    q = deformation.q

    ops = build_operators(seq, cfg.n_max, gate=gate)
    reports = [verify_qmutator(ops, q), *verify_delta_relations(ops, q)]

    # Q-oscillator with Q = q, built natively and mapped from the chosen sequence
    native = build_operators(
        SpectrumSequence(kind=SequenceKind.SYMMETRIC, deformation=deformation), cfg.n_max, gate=gate,
    )
    reports.append(verify_Q_oscillator(native, q))

    results = {"sequence": seq.label, "n_max": cfg.n_max, "formal_adjoint": not gate, "tolerance": tol}
    passed = True
    if seq.kind is not SequenceKind.SYMMETRIC:
        # the symmetric sequence is the Q-oscillator itself; F would be the identity
        fmap = build_fmap(seq, deformation, alpha=parse_complex(cfg.alpha), n_max=cfg.n_max, gate=gate)
        A, A_dag = mapped_operators(fmap, ops)
        mapped = verify_Q_oscillator(ops, q, A=A, A_dag=A_dag)
        reports.append(mapped.model_copy(update={"relation": "F-mapped " + mapped.relation}))
        map_gap = float(max(np.abs(A - native.a).max(), np.abs(A_dag - native.a_dag).max()))
        results["f_values"] = fmap.f_values
        results["map_vs_native"] = map_gap
        passed = map_gap <= tol

    results["relations"] = [
        {"relation": r.relation, "rows_checked": r.rows_checked,
         "max_residual": r.max_residual, "passed": r.passed(tol)}
        for r in reports
    ]
    passed = passed and all(r.passed(tol) for r in reports)
    return Outcome(results=results, passed=passed)


def _coherent(cfg: RunConfig) -> Outcome:
    state = build_state(cfg.spectrum, parse_complex(cfg.z), cfg.tol)
    # a terminated ladder ends on box(n_max) = 0, which only Delta' reads
    gate = not (cfg.formal or state.terminated)
    ops = build_operators(cfg.spectrum, max(2, state.n_max), gate=gate)
    results = state_to_json(state)
    residual = eigen_residual(state, ops)
    limit = 10 * state.tail_bound + RESIDUAL_FLOOR
    results["eigen_residual"] = residual
    results["residual_limit"] = limit
    rows = [[n, float(c.real), float(c.imag)] for n, c in enumerate(state.coeffs)]
    return Outcome(results=results, passed=residual <= limit, table=(["n", "re", "im"], rows))


def _overlap(cfg: RunConfig) -> Outcome:
    tol = CONTINUITY_TOLERANCE if cfg.tol is None else cfg.tol
    seq = cfg.spectrum
    if cfg.z2 is not None:
        s1 = build_state(seq, parse_complex(cfg.z))
        s2 = build_state(seq, parse_complex(cfg.z2))
        gap = continuity_gap(s1, s2)
        return Outcome(
            results={"z": s1.z, "z2": s2.z, "overlap": overlap(s1, s2),
                     "lhs": gap.lhs, "rhs": gap.rhs, "gap": gap.gap},
            passed=gap.gap <= tol,
        )

    seed = 0 if cfg.seed is None else cfg.seed
    rng = np.random.default_rng(seed)
    z1 = sample_disk(rng, RANDOM_PAIRS, RANDOM_RADIUS)
    z2 = sample_disk(rng, RANDOM_PAIRS, RANDOM_RADIUS)
    gaps = [continuity_gap(build_state(seq, a), build_state(seq, b)).gap for a, b in zip(z1, z2)]
    worst = max(gaps)
    return Outcome(
        results={"pairs": RANDOM_PAIRS, "radius": RANDOM_RADIUS, "max_gap": worst},
        passed=worst <= tol,
        seed=seed,
    )


def _resolve(cfg: RunConfig, n_check: int):
    return resolve_weight(
        cfg.spectrum, n_check, x_max=cfg.x_max, points=cfg.points,
        epsilons=cfg.epsilons, regularized=cfg.regularized,
    )


def _weight_summary(table) -> dict:
    return {
        "sequence": table.sequence.label,
        "method": table.method.value,
        "ladder": table.ladder,
        "y_cutoff": table.y_cutoff,
        "imag_residue": table.imag_residue,
        "edge_terms": table.edge_terms,
        "grid_points": int(table.grid.size),
        "x_range": [float(table.grid[0]), float(table.grid[-1])],
        "moment_report": moment_report_json(table.moment_report),
    }


def _weight(cfg: RunConfig) -> Outcome:
    table = _resolve(cfg, cfg.n_check)
    return Outcome(results=_weight_summary(table), table=weight_rows(table))


def _verify_unity(cfg: RunConfig) -> Outcome:
    tol = settings.MOMENT_TOLERANCE if cfg.tol is None else cfg.tol
    table = _resolve(cfg, cfg.n_check)
    results = _weight_summary(table)
    results["tolerance"] = tol
    return Outcome(
        results=results, passed=table.moment_report.passed(tol), table=moment_rows(table.moment_report),
    )


def _bargmann(cfg: RunConfig) -> Outcome:
    tol = settings.MOMENT_TOLERANCE if cfg.tol is None else cfg.tol
    seq = cfg.spectrum
    z = parse_complex(cfg.z)
    if cfg.z2 is not None:
        amplitudes = np.array(build_state(seq, parse_complex(cfg.z2)).coeffs)
    else:
        amplitudes = np.zeros(cfg.n + 1, dtype=complex)
        amplitudes[cfg.n] = 1.0
    symbol = make_symbol(amplitudes, seq)
    weight = _resolve(cfg, symbol.amplitudes.size - 1)

    direct = to_symbol(symbol.amplitudes, seq, np.conj(z))
    kernel = kernel_reproduce(symbol, weight, z, tol)
    norm = symbol_inner_product(symbol, symbol, weight, tol)
    results = {
        "sequence": seq.label,
        "z": z,
        "levels": int(symbol.amplitudes.size),
        "symbol_at_conj_z": direct,
        "kernel_reproduced": kernel,
        "kernel_gap": abs(kernel - direct),
        "norm_squared": norm,
        "worst_moment_error": weight.moment_report.max_rel_error,
    }
    passed = abs(kernel - direct) <= tol
    if cfg.z2 is not None:
        expansion = overcompleteness_check(parse_complex(cfg.z2), weight, tol)
        results["overcompleteness_deviation"] = expansion.deviation
        passed = passed and expansion.deviation <= tol
    return Outcome(results=results, passed=passed)


_COMMANDS: dict[str, Callable[[RunConfig], Outcome]] = {
    "qnum":           _qnum,
    "expq":           _expq,
    "dump-ops":       _dump_ops,
    "verify-algebra": _verify_algebra,
    "coherent":       _coherent,
    "overlap":        _overlap,
    "weight":         _weight,
    "verify-unity":   _verify_unity,
    "bargmann":       _bargmann,
}


# ─────────────────────────────────────────────────────────────────
# Parsing and dispatch
# ─────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sequence", choices=[k.value for k in SequenceKind])
    common.add_argument("--q", type=float, help="real deformation parameter (1 = classical)")
    common.add_argument("--theta", type=float, help="phase angle of q in radians")
    common.add_argument("--n", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--x-max", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--epsilons", help="comma-separated regularization ladder")
    common.add_argument("--order", type=int)
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--output")
    common.add_argument("--seed", type=int)
    common.add_argument("--n-check", type=int)
    common.add_argument("--z", help="complex label, e.g. 0.7+0.2j")
    common.add_argument("--z2")
    common.add_argument("--x")
    common.add_argument("--alpha")
    common.add_argument("--regularized", action="store_true", default=None)
    common.add_argument("--formal", action="store_true", default=None,
                        help="allow non-positive box values (unconjugated adjoint)")

    parser = argparse.ArgumentParser(prog="qcoherent", description="q-deformed coherent states")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if k != "command" and v is not None}
    if "epsilons" in values:
        values["epsilons"] = parse_float_list(values["epsilons"])
    return RunConfig(**values)


def _render(command: str, cfg: RunConfig, outcome: Outcome, runtime_ms: float) -> str:
    if cfg.format is None and outcome.text is not None:
        return outcome.text
    if cfg.format is OutputFormat.CSV:
        if outcome.table is None:
            raise ValueError(f"{command} has no CSV output")
        return render_csv(*outcome.table)
    report = CommandReport(
        command=command,
        config=cfg.model_dump(mode="json"),
        results=outcome.results,
        metadata=RunMetadata(version=__version__, runtime_ms=runtime_ms, seed=outcome.seed),
    )
    return render_json(report)


def _attach_values(argv: list[str]) -> list[str]:
    """Rewrite `--z -1j` as `--z=-1j` so argparse does not read the value as an option."""
    out = []
    tokens = iter(argv)
    for token in tokens:
        if token in _COMPLEX_FLAGS:
            value = next(tokens, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    start = time.perf_counter()
    try:
        cfg = _config(args)
        outcome = _COMMANDS[args.command](cfg)
        runtime_ms = round((time.perf_counter() - start) * 1000, 3)
        emit(_render(args.command, cfg, outcome, runtime_ms), cfg.output)
    except QAlgebraError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except (ValidationError, ValueError) as exc:
        logger.error("invalid input: %s", exc)
        return 2

    if not outcome.passed:
        logger.warning("%s: verification exceeded tolerance", args.command)
        return 1
    return 0
