"""
export_service.py — command output as JSON documents or CSV tables.

Both writers are deterministic: fixed key order, shortest round-trip floats,
"\n" line endings. Without a path the text goes to stdout.
"""
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from qcoherent.models.measure_model import MomentReport, WeightTable
from qcoherent.models.report_model import CommandReport
from qcoherent.utils.number_utils import format_float, to_jsonable

logger = logging.getLogger(__name__)


def render_json(report: CommandReport) -> str:
    return json.dumps(to_jsonable(report.to_document()), indent=2, ensure_ascii=False) + "\n"


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def emit(text: str, output: str | Path | None) -> None:
    """Write to `output` (parents created) or to stdout."""
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    logger.info("written: %s", path)


# ─────────────────────────────────────────────────────────────────
# Table layouts
# ─────────────────────────────────────────────────────────────────

def weight_rows(table: WeightTable) -> tuple[list[str], list[list]]:
    """(x, W_tilde, epsilon) per grid point."""
    eps = float(table.epsilon)
    rows = [[float(x), float(w), eps] for x, w in zip(table.grid, table.values)]
    return ["x", "W_tilde", "epsilon"], rows


def moment_rows(report: MomentReport) -> tuple[list[str], list[list]]:
    rows = [[r.n, r.achieved, r.target, r.rel_error] for r in report.rows]
    return ["n", "achieved", "target", "rel_error"], rows


def moment_report_json(report: MomentReport) -> dict:
    return {
        "max_rel_error": report.max_rel_error,
        "rows": [
            {"n": r.n, "achieved": r.achieved, "target": r.target, "rel_error": r.rel_error}
            for r in report.rows
        ],
    }
