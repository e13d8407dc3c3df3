import io
import json

import pandas as pd
import pytest

from app import main, parse_nc, parse_node_choices
from app_constants import ExitCodes
from config import AppConfig


def _system(name: str) -> str:
    return str(AppConfig.SYSTEMS_DIR / f"{name}.json")


def _total(path) -> float:
    return json.loads(path.read_text(encoding="utf-8"))[0]["c_total"]


def test_estimate_writes_one_row(tmp_path, capsys) -> None:
    out = tmp_path / "report.csv"

    code = main(
        ["estimate", "--system", _system("ga102_4c"), "--package", "emib", "--out", str(out)]
    )

    assert code == ExitCodes.OK
    df = pd.read_csv(out)
    assert len(df) == 1
    assert df["architecture"].iloc[0] == "silicon_bridge"
    assert df["bridge_count"].iloc[0] >= 1
    assert "total" in capsys.readouterr().out


def test_estimate_monolithic_uses_single_die(tmp_path) -> None:
    out = tmp_path / "mono.csv"

    code = main(
        ["estimate", "--system", _system("ga102"), "--package", "mono", "--out", str(out)]
    )

    assert code == ExitCodes.OK
    df = pd.read_csv(out)
    assert "c_mfg_monolithic" in df.columns
    assert df["package_area_mm2"].iloc[0] == pytest.approx(628.0)


def test_estimate_compare_monolithic(capsys) -> None:
    code = main(["estimate", "--system", _system("emr_2c"), "--compare-monolithic"])

    assert code == ExitCodes.OK
    assert "chiplet/monolithic" in capsys.readouterr().out


def test_sweep_prints_grid(capsys) -> None:
    code = main(
        [
            "sweep",
            "--system",
            _system("ga102"),
            "--nodes",
            "logic=7,10",
            "analog=10,14",
            "memory=10,14",
            "--nc",
            "1",
            "--package",
            "rdl",
        ]
    )

    captured = capsys.readouterr()
    assert code == ExitCodes.OK
    df = pd.read_csv(io.StringIO(captured.out))
    assert len(df) == 8
    assert df["config_label"].iloc[0] == "(7,10,10)"
    assert (df["status"] == "ok").all()
    assert "best:" in captured.err


def test_sweep_writes_json(tmp_path) -> None:
    out = tmp_path / "grid.json"

    code = main(
        [
            "sweep",
            "--system",
            _system("ga102_logic"),
            "--nodes",
            "logic=7",
            "--nc",
            "1..3",
            "--package",
            "rdl,emib",
            "--out",
            str(out),
        ]
    )

    assert code == ExitCodes.OK
    records = json.loads(out.read_text(encoding="utf-8"))
    assert len(records) == 6


def test_missing_system_is_a_validation_error(tmp_path, capsys) -> None:
    missing = tmp_path / "nope.json"

    code = main(["estimate", "--system", str(missing)])

    assert code == ExitCodes.VALIDATION
    assert str(missing) in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["estimate", "--system", "x.json", "--package", "glue"],
        ["sweep", "--system", "x.json", "--nc", "0"],
        ["sweep", "--system", "x.json", "--nc", "two"],
        ["sweep", "--system", "x.json", "--nodes", "cache=7"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv, tmp_path, monkeypatch) -> None:
    monkeypatch.chdir(tmp_path)
    (tmp_path / "x.json").write_text(
        json.dumps(
            {"chiplets": [{"name": "a", "type": "logic", "mtransistors": 10, "node": "7nm"}]}
        ),
        encoding="utf-8",
    )

    assert main(argv) == ExitCodes.USAGE


def test_validate_default_database(capsys) -> None:
    code = main(["validate", "--system", _system("ga102")])

    out = capsys.readouterr().out
    assert code == ExitCodes.OK
    assert "database ok" in out
    assert "system ok: ga102" in out


def _bad_db(tmp_path):
    document = json.loads(AppConfig.DEFAULT_DB_PATH.read_text(encoding="utf-8"))
    document["nodes"]["7nm"]["d0"] = 0.5
    path = tmp_path / "bad_db.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_out_of_range_database_is_rejected(tmp_path, capsys) -> None:
    code = main(["validate", "--db", str(_bad_db(tmp_path))])

    assert code == ExitCodes.VALIDATION
    assert "d0" in capsys.readouterr().err


def test_out_of_range_database_can_be_allowed(tmp_path) -> None:
    code = main(["validate", "--db", str(_bad_db(tmp_path)), "--allow-out-of-range"])

    assert code == ExitCodes.OK


def test_database_from_environment(tmp_path, monkeypatch, capsys) -> None:
    monkeypatch.setenv(AppConfig.DB_ENV_VAR, str(_bad_db(tmp_path)))

    assert main(["validate"]) == ExitCodes.VALIDATION


def test_floorplan_writes_json(tmp_path) -> None:
    out = tmp_path / "fp.json"

    code = main(["floorplan", "--system", _system("ga102_4c"), "--out", str(out)])

    assert code == ExitCodes.OK
    document = json.loads(out.read_text(encoding="utf-8"))
    assert len(document["chiplets"]) == 4
    assert document["package_area_mm2"] >= document["silicon_area_mm2"]


def test_cleaner_fab_source_lowers_total(tmp_path) -> None:
    dirty, clean = tmp_path / "coal.json", tmp_path / "solar.json"

    assert main(["estimate", "--system", _system("ga102"), "--out", str(dirty)]) == 0
    code = main(
        ["estimate", "--system", _system("ga102"), "--fab-source", "solar", "--out", str(clean)]
    )

    assert code == ExitCodes.OK
    assert _total(clean) < _total(dirty)


def test_unreachable_link_exits_infeasible(tmp_path, capsys) -> None:
    system = tmp_path / "row.json"
    system.write_text(
        json.dumps(
            {
                "chiplets": [
                    {"name": name, "type": "logic", "mtransistors": 9120, "node": "7nm"}
                    for name in ("a", "b", "c", "d")
                ],
                "package": {"architecture": "silicon_bridge"},
                "connectivity": [["a", "d"]],
            }
        ),
        encoding="utf-8",
    )

    code = main(["estimate", "--system", str(system)])

    assert code == ExitCodes.INFEASIBLE
    assert "infeasible" in capsys.readouterr().err


def test_parse_helpers() -> None:
    assert parse_nc("2..4") == (2, 3, 4)
    assert parse_nc("1,8") == (1, 8)
    assert parse_node_choices(["logic=7,10nm"]) == {"logic": ("7nm", "10nm")}
