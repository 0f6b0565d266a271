"""
Serialization of sweep records to JSON, CSV and markdown, and the readers
for the first two.
"""

import io
import json
import logging
from typing import Dict, List, Optional

import pandas as pd

from toolkit.sweep import SweepRecord, determinism_hash
from utils.data_loader import dumps, parse_number, to_serializable
from utils.report_writer import ReportWriter

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "md")


def _cell(value) -> str:
    if value is None:
        return ""
    serialized = to_serializable(value)
    return serialized if isinstance(serialized, str) else repr(serialized)


def _coefficient_count(records: List[SweepRecord]) -> int:
    return max((len(r.ell_coeffs) for r in records if r.ell_coeffs is not None), default=0)


def records_frame(records: List[SweepRecord]) -> pd.DataFrame:
    """Columns eps, delta, c, b0..bn, status, ms; every cell a string"""
    width = _coefficient_count(records)
    columns = ["eps", "delta", "c"] + [f"b{i}" for i in range(width)] + ["status", "ms"]
    rows = []
    for r in records:
        coeffs = list(r.ell_coeffs or []) + [None] * (width - len(r.ell_coeffs or []))
        rows.append([_cell(r.eps), _cell(r.delta), _cell(r.c_value)] + [_cell(b) for b in coeffs]
                    + [r.lp_status, repr(r.wall_time_ms)])
    return pd.DataFrame(rows, columns=columns, dtype=str)


def to_json(records: List[SweepRecord], context: Optional[Dict] = None) -> str:
    document = {
        "records": [r.to_dict() for r in records],
        "determinism_hash": determinism_hash(records),
    }
    if context:
        document["context"] = context
    return dumps(document)


def to_csv(records: List[SweepRecord]) -> str:
    buffer = io.StringIO()
    records_frame(records).to_csv(buffer, index=False)
    return buffer.getvalue()


def to_markdown(records: List[SweepRecord], context: Optional[Dict] = None) -> str:
    context = context or {}
    writer = ReportWriter(context.get("title", "Perturbation sweep"))
    summary = context.get("summary")
    if summary:
        writer.add_heading("Summary")
        writer.add_bullets(f"{key}: {_cell(value) or 'none'}" for key, value in sorted(summary.items()))
    writer.add_heading("Records")
    frame = records_frame(records)
    writer.add_table(list(frame.columns), frame.itertuples(index=False, name=None))
    ids = context.get("triangulation_ids") or {}
    writer.add_heading("Triangulations")
    if ids:
        writer.add_table(["eps", "triangulation id"], sorted(ids.items(), key=lambda item: parse_number(item[0])))
    else:
        writer.add_paragraph("No successful LP solves.")
    writer.add_conventions()
    writer.add_paragraph(f"Determinism hash: `{determinism_hash(records)}`")
    return writer.create_document()


def report(records: List[SweepRecord], fmt: str, context: Optional[Dict] = None) -> str:
    """
    Deterministic document for a record list.

    Args:
        records: sweep records, possibly empty
        fmt: one of json, csv, md
        context: optional run metadata (summary, triangulation_ids, title)
    """
    if fmt == "json":
        return to_json(records, context)
    if fmt == "csv":
        return to_csv(records)
    if fmt == "md":
        return to_markdown(records, context)
    raise ValueError(f"Unknown format '{fmt}'; available: {', '.join(FORMATS)}")


def read_json(text: str) -> List[SweepRecord]:
    data = json.loads(text)
    entries = data["records"] if isinstance(data, dict) else data
    return [SweepRecord.from_dict(entry) for entry in entries]


def read_csv(text: str) -> List[SweepRecord]:
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    coefficient_columns = [c for c in frame.columns if c.startswith("b") and c[1:].isdigit()]
    records = []
    for row in frame.to_dict(orient="records"):
        coeffs = [parse_number(row[c]) for c in coefficient_columns]
        records.append(SweepRecord(
            eps=parse_number(row["eps"]),
            ell_coeffs=None if all(b is None for b in coeffs) else coeffs,
            c_value=parse_number(row["c"]),
            delta=parse_number(row["delta"]),
            lp_status=row["status"],
            wall_time_ms=float(row["ms"]),
        ))
    logger.debug(f"Read {len(records)} records from CSV")
    return records


def context_for(result) -> Dict:
    """Report context of a SweepResult"""
    return {
        "summary": result.summary(),
        "triangulation_ids": result.triangulation_ids,
        "title": "Perturbation sweep",
    }
