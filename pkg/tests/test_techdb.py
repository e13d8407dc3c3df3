import json
import logging
from dataclasses import replace

import pytest

from config import AppConfig, FabSources
from data.errors import DatabaseParseError, ParameterValidationError, ResolutionError
from data.loader import load_database, load_system, resolve_db_path, save_database
from data.techdb import (
    TechnologyNode,
    check_d0_ordering,
    lookup,
    most_advanced,
    resolve_node,
    with_fab_source,
)


def _default_document() -> dict:
    return json.loads(AppConfig.DEFAULT_DB_PATH.read_text(encoding="utf-8"))


def _write(path, document) -> str:
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def test_lookup_returns_stored_parameters(default_db) -> None:
    params = lookup(default_db, "7nm")

    assert params.dt["logic"] == 91.2
    assert params.d0 == 0.25
    assert lookup(default_db, resolve_node(default_db, "7nm")) is params


def test_lookup_unknown_node_raises_resolution_error(default_db) -> None:
    with pytest.raises(ResolutionError, match="3nm"):
        lookup(default_db, "3nm")


def test_node_names_run_from_most_to_least_advanced(default_db) -> None:
    assert default_db.node_names == ["7nm", "10nm", "14nm", "22nm", "28nm", "40nm", "65nm"]
    newest = TechnologyNode(feature_index=0, name="7nm")
    assert newest < TechnologyNode(feature_index=6, name="65nm")


def test_most_advanced_picks_smallest_feature_index(default_db) -> None:
    assert most_advanced(default_db, ["14nm", "65nm", "7nm"]) == "7nm"
    with pytest.raises(ResolutionError):
        most_advanced(default_db, [])


def test_default_database_has_monotone_defect_density(default_db) -> None:
    assert check_d0_ordering(default_db) == []


def test_d0_ordering_check_warns_for_older_node_with_more_defects(default_db, caplog) -> None:
    nodes = dict(default_db.nodes)
    node = resolve_node(default_db, "14nm")
    nodes[node] = replace(nodes[node], d0=0.3)
    broken = replace(default_db, nodes=nodes)

    with caplog.at_level(logging.WARNING):
        offenders = check_d0_ordering(broken)

    assert offenders == ["14nm"]
    assert "14nm" in caplog.text


def test_with_fab_source_applies_named_preset(default_db) -> None:
    solar = with_fab_source(default_db, FabSources.SOLAR)

    assert solar.fab.c_mfg_src == 48.0
    assert solar.fab.c_pkg_src == 48.0
    assert solar.fab.c_des_src == 48.0
    assert default_db.fab.c_mfg_src == 700.0


def test_with_fab_source_can_target_one_activity(default_db) -> None:
    updated = with_fab_source(default_db, 475.0, targets=["mfg"])

    assert updated.fab.c_mfg_src == 475.0
    assert updated.fab.c_pkg_src == default_db.fab.c_pkg_src
    assert updated.fab.c_des_src == default_db.fab.c_des_src


def test_with_fab_source_rejects_unknown_preset(default_db) -> None:
    with pytest.raises(ResolutionError, match="unknown fab energy source"):
        with_fab_source(default_db, "peat")


def test_load_database_rejects_out_of_range_d0(tmp_path) -> None:
    document = _default_document()
    document["nodes"]["10nm"]["d0"] = 0.5

    with pytest.raises(ParameterValidationError) as excinfo:
        load_database(_write(tmp_path / "db.json", document))

    message = str(excinfo.value)
    assert "d0" in message
    assert "[0.07,0.3]" in message


def test_load_database_override_accepts_out_of_range_with_warning(tmp_path, caplog) -> None:
    document = _default_document()
    document["nodes"]["10nm"]["d0"] = 0.5

    with caplog.at_level(logging.WARNING):
        db = load_database(_write(tmp_path / "db.json", document), allow_out_of_range=True)

    assert lookup(db, "10nm").d0 == 0.5
    assert "out-of-range" in caplog.text


def test_load_database_accepts_small_custom_file(tmp_path) -> None:
    document = _default_document()
    document["nodes"] = {
        "10nm": dict(document["nodes"]["10nm"], d0=0.1),
        "65nm": document["nodes"]["65nm"],
    }

    db = load_database(_write(tmp_path / "db.json", document))

    assert db.node_names == ["10nm", "65nm"]
    assert lookup(db, "10nm").d0 == 0.1
    assert lookup(db, "10nm").alpha == 3.0


def test_packaging_node_must_be_a_mature_node(tmp_path, caplog) -> None:
    document = _default_document()
    document["packaging"]["node"] = "7nm"
    path = _write(tmp_path / "db.json", document)

    with pytest.raises(ParameterValidationError, match="packaging.node"):
        load_database(path)

    with caplog.at_level(logging.WARNING):
        db = load_database(path, allow_out_of_range=True)
    assert db.packaging_defaults.node == "7nm"
    assert "packaging.node" in caplog.text


def test_load_database_missing_file_names_path(tmp_path) -> None:
    missing = tmp_path / "nowhere.json"

    with pytest.raises(DatabaseParseError, match="nowhere.json"):
        load_database(missing)


def test_load_database_rejects_invalid_json(tmp_path) -> None:
    path = tmp_path / "db.json"
    path.write_text("{not json", encoding="utf-8")

    with pytest.raises(DatabaseParseError, match="not valid JSON"):
        load_database(path)


def test_load_database_rejects_schema_violation(tmp_path) -> None:
    document = _default_document()
    del document["fab"]

    with pytest.raises(DatabaseParseError, match="fab"):
        load_database(_write(tmp_path / "db.json", document))


def test_saved_database_loads_back_unchanged(default_db, tmp_path) -> None:
    path = save_database(default_db, tmp_path / "copy.json")

    assert load_database(path) == default_db


def test_database_path_comes_from_environment(monkeypatch, tmp_path) -> None:
    target = tmp_path / "env_db.json"
    monkeypatch.setenv(AppConfig.DB_ENV_VAR, str(target))

    assert resolve_db_path() == target
    assert resolve_db_path(tmp_path / "explicit.json") == tmp_path / "explicit.json"


def test_database_path_falls_back_to_bundled_file(monkeypatch) -> None:
    monkeypatch.delenv(AppConfig.DB_ENV_VAR, raising=False)

    assert resolve_db_path() == AppConfig.DEFAULT_DB_PATH


def test_system_with_node_missing_from_database_fails_at_load(default_db, tmp_path) -> None:
    system = {
        "name": "tiny",
        "chiplets": [{"name": "cpu", "type": "logic", "mtransistors": 100, "node": "3nm"}],
    }

    with pytest.raises(ResolutionError, match="3nm"):
        load_system(_write(tmp_path / "tiny.json", system), default_db)


def test_system_with_duplicate_chiplet_names_is_rejected(default_db, tmp_path) -> None:
    chiplet = {"name": "cpu", "type": "logic", "mtransistors": 100, "node": "7nm"}
    system = {"name": "dup", "chiplets": [chiplet, chiplet]}

    with pytest.raises(ParameterValidationError, match="unique names"):
        load_system(_write(tmp_path / "dup.json", system), default_db)


def test_system_connectivity_must_reference_known_chiplets(default_db, tmp_path) -> None:
    system = {
        "name": "links",
        "chiplets": [{"name": "cpu", "type": "logic", "mtransistors": 100, "node": "7nm"}],
        "connectivity": [["cpu", "gpu"]],
    }

    with pytest.raises(ResolutionError, match="gpu"):
        load_system(_write(tmp_path / "links.json", system), default_db)


def test_system_overrides_layer_on_database_defaults(default_db, tmp_path) -> None:
    system = {
        "name": "override",
        "chiplets": [{"name": "cpu", "type": "logic", "mtransistors": 100, "node": "7nm"}],
        "package": {"architecture": "active_interposer", "spacing": 0.2},
        "design": {"t_verif": 500.0, "n_parts": 1000, "reuse": ["cpu"]},
    }

    spec = load_system(_write(tmp_path / "override.json", system), default_db)

    assert spec.package.architecture == "active_interposer"
    assert spec.package.spacing == 0.2
    assert spec.package.l_rdl == default_db.packaging_defaults.l_rdl
    assert spec.design.t_verif == 500.0
    assert spec.design.verif_share is None
    assert spec.design.n_parts == 1000
    assert spec.design.reuse == frozenset({"cpu"})
    assert spec.connectivity is None


def test_every_shipped_system_loads(shipped) -> None:
    names = ["ga102", "ga102_4c", "ga102_logic", "emr_2c", "emr_4c", "a15_4c", "tigerlake_3c"]

    for name in names:
        spec = shipped(name)
        assert spec.chiplets, name
