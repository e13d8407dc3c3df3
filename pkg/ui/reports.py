"""Tabular and JSON report builders for evaluations, sweeps and floorplans."""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from app_constants import OutputFormats, ReportColumns, Statuses
from config import ReportConfig
from data.errors import ParameterValidationError
from data.floorplan import FloorplanResult
from data.system import CarbonReport, SweepEntry

logger = logging.getLogger(__name__)

Row = Union[CarbonReport, SweepEntry]


def _as_entry(item: Row) -> SweepEntry:
    if isinstance(item, SweepEntry):
        return item
    return SweepEntry(item.config_label, item.n_chiplets, item.architecture, report=item)


def _row(entry: SweepEntry) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        ReportColumns.CONFIG_LABEL: entry.label,
        ReportColumns.N_CHIPLETS: entry.n_chiplets,
        ReportColumns.ARCHITECTURE: entry.architecture,
        ReportColumns.STATUS: entry.status,
    }
    report = entry.report
    if report is None:
        row[ReportColumns.ERROR] = entry.error
        return row

    for name, carbon in report.per_chiplet_mfg.items():
        row[f"{ReportColumns.MFG_PREFIX}{name}"] = carbon
    row.update(
        {
            ReportColumns.C_PACKAGE: report.c_package,
            ReportColumns.C_COMM: report.c_comm,
            ReportColumns.C_HI: report.c_hi,
            ReportColumns.C_DES: report.c_des,
            ReportColumns.C_TOTAL: report.c_total,
            ReportColumns.PACKAGE_AREA: report.package_area,
            ReportColumns.WHITESPACE: report.whitespace,
            ReportColumns.BRIDGE_COUNT: report.bridge_count,
            ReportColumns.ERROR: None,
        }
    )
    return row


def report_rows(items: Iterable[Row]) -> List[Dict[str, Any]]:
    """One dict per configuration, in input order."""
    return [_row(_as_entry(item)) for item in items]


def reports_frame(items: Iterable[Row]) -> pd.DataFrame:
    """
    Build the report table.

    Columns are the leading identifiers, one c_mfg_<chiplet> column per chiplet name
    in order of first appearance, then the totals. Infeasible rows hold NaN in every
    numeric column.
    """
    rows = report_rows(items)
    mfg_columns: List[str] = []
    for row in rows:
        for key in row:
            if key.startswith(ReportColumns.MFG_PREFIX) and key not in mfg_columns:
                mfg_columns.append(key)
    columns = ReportConfig.LEADING_COLUMNS + mfg_columns + ReportConfig.TRAILING_COLUMNS

    df = pd.DataFrame(rows, columns=columns)
    numeric = mfg_columns + [
        c for c in ReportConfig.TRAILING_COLUMNS
        if c not in (ReportColumns.BRIDGE_COUNT, ReportColumns.ERROR)
    ]
    df[numeric] = df[numeric].apply(pd.to_numeric, errors="coerce")
    df[ReportColumns.BRIDGE_COUNT] = pd.to_numeric(df[ReportColumns.BRIDGE_COUNT]).astype("Int64")
    df[ReportColumns.N_CHIPLETS] = df[ReportColumns.N_CHIPLETS].astype("Int64")
    return df


def breakdown_frame(report: CarbonReport) -> pd.DataFrame:
    """Per-term carbon of one configuration with each term's share of the total."""
    terms = {f"mfg:{name}": value for name, value in report.per_chiplet_mfg.items()}
    terms.update(
        {
            "package": report.c_package,
            "comm": report.c_comm,
            "design": report.c_des,
        }
    )
    df = pd.DataFrame({"term": list(terms), "carbon_g": list(terms.values())})
    df["share"] = df["carbon_g"] / report.c_total if report.c_total else np.nan
    return df


def floorplan_document(result: FloorplanResult) -> Dict[str, Any]:
    """
    Placed boxes and adjacencies of a floorplan as a JSON-ready document.

    Args:
        result: Floorplan to describe

    Returns:
        Dict with package dimensions and areas, one entry per chiplet box and
        one per adjacent pair with its shared edge
    """
    boxes = result.boxes()
    return {
        "width_mm": result.width,
        "height_mm": result.height,
        "package_area_mm2": result.package_area,
        "silicon_area_mm2": result.silicon_area,
        "whitespace_mm2": result.whitespace,
        "spacing_mm": result.spacing,
        "chiplets": [
            {"name": name, "x": box.x, "y": box.y, "width": box.w, "height": box.h}
            for name, box in boxes.items()
        ],
        "adjacencies": [
            {"a": adj.a, "b": adj.b, "shared_edge_mm": adj.overlap} for adj in result.adjacencies
        ],
    }


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and math.isnan(value):
        return None
    if value is pd.NA:
        return None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return None if np.isnan(value) else float(value)
    return value


def frame_records(df: pd.DataFrame) -> List[Dict[str, Any]]:
    """Rows as plain dicts with NaN/NA turned into None."""
    return [
        {key: _json_safe(value) for key, value in record.items()}
        for record in df.to_dict(orient="records")
    ]


def _atomic_write(path: Path, write) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=path.suffix + ".tmp")
    os.close(fd)
    try:
        write(Path(tmp_name))
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path


def infer_format(path: Union[str, Path], fmt: Optional[str] = None) -> str:
    """Explicit format, else the one implied by the file suffix, else CSV."""
    if fmt:
        if fmt not in OutputFormats.ALL:
            raise ParameterValidationError("format", fmt, str(OutputFormats.ALL))
        return fmt
    return OutputFormats.SUFFIXES.get(Path(path).suffix.lower(), OutputFormats.CSV)


def write_frame(df: pd.DataFrame, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
    """Write a table as CSV, JSON records or an XLSX sheet, replacing the target atomically."""
    target = Path(path)
    fmt = infer_format(target, fmt)

    def write(tmp: Path) -> None:
        if fmt == OutputFormats.CSV:
            df.to_csv(tmp, index=False)
        elif fmt == OutputFormats.JSON:
            tmp.write_text(
                json.dumps(frame_records(df), indent=ReportConfig.JSON_INDENT), encoding="utf-8"
            )
        else:
            with pd.ExcelWriter(tmp, engine="openpyxl") as writer:
                df.to_excel(writer, sheet_name=ReportConfig.XLSX_SHEET_NAME, index=False)

    _atomic_write(target, write)
    logger.info("wrote %d rows to %s", len(df), target)
    return target


def write_report(items: Sequence[Row], path: Union[str, Path], fmt: Optional[str] = None) -> Path:
    """
    Write reports or sweep entries as one table.

    Args:
        items: CarbonReport or SweepEntry rows
        path: Output file, replaced atomically
        fmt: csv, json or xlsx; inferred from the suffix when None

    Returns:
        Path written
    """
    return write_frame(reports_frame(items), path, fmt)


def write_document(document: Dict[str, Any], path: Union[str, Path]) -> Path:
    """Write a JSON document atomically."""
    target = Path(path)

    def write(tmp: Path) -> None:
        tmp.write_text(json.dumps(document, indent=ReportConfig.JSON_INDENT), encoding="utf-8")

    return _atomic_write(target, write)


def summary_line(entry: SweepEntry) -> str:
    if entry.status != Statuses.OK:
        return (
            f"{entry.label} nc={entry.n_chiplets} {entry.architecture}: "
            f"infeasible ({entry.error})"
        )
    report = entry.report
    return (
        f"{entry.label} nc={entry.n_chiplets} {entry.architecture}: "
        f"total {report.c_total:,.1f} g (mfg {report.c_mfg:,.1f}, HI {report.c_hi:,.1f}, "
        f"design {report.c_des:,.1f})"
    )
