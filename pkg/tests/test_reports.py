import json
import math

import pandas as pd
import pytest

from app_constants import Architectures, ReportColumns, Statuses
from data.errors import ParameterValidationError
from data.floorplan import Block, build_floorplan
from data.system import CarbonReport, SweepEntry
from ui.reports import (
    breakdown_frame,
    floorplan_document,
    infer_format,
    reports_frame,
    summary_line,
    write_document,
    write_frame,
    write_report,
)


def _report(label: str = "(7,14,10)", **mfg: float) -> CarbonReport:
    per_chiplet = mfg or {"logic": 1000.0, "memory": 200.0}
    c_package, c_comm, c_des = 50.0, 5.0, 20.0
    return CarbonReport(
        system="demo",
        architecture=Architectures.RDL_FANOUT,
        per_chiplet_mfg=per_chiplet,
        c_package=c_package,
        c_comm=c_comm,
        c_des=c_des,
        c_total=sum(per_chiplet.values()) + c_package + c_comm + c_des,
        package_area=300.0,
        whitespace=12.5,
        config_label=label,
        n_chiplets=len(per_chiplet),
    )


def _infeasible() -> SweepEntry:
    return SweepEntry(
        "(7,7,7)", 2, Architectures.SILICON_BRIDGE, error="[package] chiplets a and c"
    )


def test_frame_has_one_row_per_configuration() -> None:
    df = reports_frame([_report(), _report("(10,14,10)")])

    assert len(df) == 2
    assert list(df.columns[:4]) == list(ReportColumns.LEADING)
    assert list(df[ReportColumns.CONFIG_LABEL]) == ["(7,14,10)", "(10,14,10)"]
    assert (df[ReportColumns.STATUS] == Statuses.OK).all()
    assert df[ReportColumns.C_HI].iloc[0] == pytest.approx(55.0)


def test_mfg_columns_follow_first_appearance() -> None:
    df = reports_frame([_report(logic=1.0), _report(memory=2.0, logic=3.0)])

    mfg = [c for c in df.columns if c.startswith(ReportColumns.MFG_PREFIX)]
    assert mfg == ["c_mfg_logic", "c_mfg_memory"]
    assert math.isnan(df["c_mfg_memory"].iloc[0])


def test_infeasible_row_keeps_error_and_nan_totals() -> None:
    df = reports_frame([_report(), _infeasible()])

    row = df.iloc[1]
    assert row[ReportColumns.STATUS] == Statuses.INFEASIBLE
    assert "a and c" in row[ReportColumns.ERROR]
    assert math.isnan(row[ReportColumns.C_TOTAL])
    assert pd.isna(row[ReportColumns.BRIDGE_COUNT])


def test_csv_round_trip_preserves_totals(tmp_path) -> None:
    path = write_report([_report(), _report("(10,10,10)", logic=900.0)], tmp_path / "out.csv")

    df = pd.read_csv(path)
    mfg = [c for c in df.columns if c.startswith(ReportColumns.MFG_PREFIX)]
    parts = df[mfg].fillna(0).sum(axis=1) + df["c_package"] + df["c_comm"] + df["c_des"]
    assert parts.tolist() == pytest.approx(df["c_total"].tolist())


def test_json_records_use_null_for_missing(tmp_path) -> None:
    path = write_report([_report(), _infeasible()], tmp_path / "out.json")

    records = json.loads(path.read_text(encoding="utf-8"))
    assert len(records) == 2
    assert records[0]["c_total"] == pytest.approx(1275.0)
    assert records[1]["c_total"] is None
    assert records[1]["status"] == Statuses.INFEASIBLE


def test_xlsx_sheet_is_readable(tmp_path) -> None:
    path = write_report([_report()], tmp_path / "out.xlsx")

    df = pd.read_excel(path, sheet_name="carbon", engine="openpyxl")
    assert df["c_total"].iloc[0] == pytest.approx(1275.0)


def test_repeated_writes_are_identical(tmp_path) -> None:
    rows = [_report(), _infeasible()]
    first = write_report(rows, tmp_path / "a.csv").read_bytes()
    second = write_report(rows, tmp_path / "b.csv").read_bytes()

    assert first == second


def test_infer_format() -> None:
    assert infer_format("out.json") == "json"
    assert infer_format("OUT.XLSX") == "xlsx"
    assert infer_format("out.txt") == "csv"
    assert infer_format("out.csv", "json") == "json"
    with pytest.raises(ParameterValidationError):
        infer_format("out.csv", "parquet")


def test_write_frame_replaces_existing_file(tmp_path) -> None:
    target = tmp_path / "nested" / "out.csv"
    write_frame(pd.DataFrame({"a": [1]}), target)
    write_frame(pd.DataFrame({"a": [2, 3]}), target)

    assert pd.read_csv(target)["a"].tolist() == [2, 3]
    assert [p.name for p in target.parent.iterdir()] == ["out.csv"]


def test_breakdown_shares_sum_to_one() -> None:
    df = breakdown_frame(_report())

    assert df["term"].tolist() == ["mfg:logic", "mfg:memory", "package", "comm", "design"]
    assert df["share"].sum() == pytest.approx(1.0)


def test_floorplan_document(tmp_path) -> None:
    result = build_floorplan(
        [Block("a", 100.0, width=10.0, height=10.0), Block("b", 100.0, width=10.0, height=10.0)],
        spacing=0.5,
    )
    document = floorplan_document(result)

    assert {c["name"] for c in document["chiplets"]} == {"a", "b"}
    assert document["silicon_area_mm2"] == pytest.approx(200.0)
    assert document["adjacencies"][0]["shared_edge_mm"] == pytest.approx(10.0)

    path = write_document(document, tmp_path / "fp.json")
    assert json.loads(path.read_text(encoding="utf-8")) == document


def test_summary_line() -> None:
    ok = SweepEntry("(7,14,10)", 2, Architectures.RDL_FANOUT, report=_report())

    assert "total 1,275.0 g" in summary_line(ok)
    assert "infeasible" in summary_line(_infeasible())
