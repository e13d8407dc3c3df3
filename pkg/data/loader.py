"""Loading and saving of technology databases and system descriptions."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import asdict, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import jsonschema

from config import AppConfig
from data.design import DesignParams
from data.errors import DatabaseParseError
from data.manufacturing import Chiplet
from data.packaging import PackagingParams
from data.system import SystemSpec
from data.techdb import FabProfile, ProcessParams, TechDatabase, TechnologyNode
from data.validators import validate_database, validate_system

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_PACKAGING_FIELDS = {f.name for f in fields(PackagingParams)}
_DESIGN_FIELDS = {f.name for f in fields(DesignParams)} - {"reuse"}


def _read_json(path: Path, context: str) -> Dict[str, Any]:
    """Read a JSON document, turning I/O and syntax problems into DatabaseParseError."""
    if not path.exists():
        raise DatabaseParseError(f"{context} file not found: {path}")
    try:
        with path.open(encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise DatabaseParseError(
            f"{context} file {path} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    except OSError as exc:
        raise DatabaseParseError(f"unable to read {context.lower()} file {path}: {exc}") from exc


def _check_schema(document: Dict[str, Any], schema_path: Path, source: Path, context: str) -> None:
    schema = _read_json(schema_path, "Schema")
    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(part) for part in exc.absolute_path) or "<root>"
        raise DatabaseParseError(
            f"{context} file {source} is malformed at {where}: {exc.message}"
        ) from exc


def resolve_db_path(explicit: Optional[PathLike] = None) -> Path:
    """Database path from the argument, the environment, or the bundled default."""
    if explicit:
        return Path(explicit)
    from_env = os.environ.get(AppConfig.DB_ENV_VAR)
    if from_env:
        logger.debug("using database from $%s: %s", AppConfig.DB_ENV_VAR, from_env)
        return Path(from_env)
    return AppConfig.DEFAULT_DB_PATH


def _packaging_params(
    raw: Dict[str, Any],
    base: Optional[PackagingParams] = None,
) -> PackagingParams:
    unknown = set(raw) - _PACKAGING_FIELDS
    if unknown:
        raise DatabaseParseError(f"unknown packaging parameters: {sorted(unknown)}")
    return replace(base or PackagingParams(), **raw)


def _design_params(raw: Dict[str, Any], base: Optional[DesignParams] = None) -> DesignParams:
    raw = dict(raw)
    reuse = raw.pop("reuse", None)
    unknown = set(raw) - _DESIGN_FIELDS
    if unknown:
        raise DatabaseParseError(f"unknown design parameters: {sorted(unknown)}")
    # A fixed verification time replaces the share unless both are given
    if "t_verif" in raw and raw["t_verif"] is not None and "verif_share" not in raw:
        raw["verif_share"] = None
    if "verif_share" in raw and raw["verif_share"] is not None and "t_verif" not in raw:
        raw["t_verif"] = None
    params = replace(base or DesignParams(), **raw)
    if reuse is not None:
        params = replace(params, reuse=frozenset(reuse))
    return params


def database_from_dict(document: Dict[str, Any]) -> TechDatabase:
    """Build a TechDatabase from its schema-checked JSON form."""
    alpha = float(document.get("alpha", 3.0))
    c_material = float(document.get("c_material", 500.0))

    nodes: Dict[TechnologyNode, ProcessParams] = {}
    for name, raw in document["nodes"].items():
        node = TechnologyNode(feature_index=int(raw["feature_index"]), name=name)
        nodes[node] = ProcessParams(
            d0=float(raw["d0"]),
            alpha=float(raw.get("alpha", alpha)),
            dt={key: float(value) for key, value in raw["dt"].items()},
            eta_eq=float(raw["eta_eq"]),
            epa=float(raw["epa"]),
            c_gas=float(raw["c_gas"]),
            c_material=float(raw.get("c_material", c_material)),
            eta_eda=float(raw["eta_eda"]),
        )

    fab = document["fab"]
    return TechDatabase(
        nodes=nodes,
        fab=FabProfile(
            c_mfg_src=float(fab["c_mfg_src"]),
            c_pkg_src=float(fab["c_pkg_src"]),
            c_des_src=float(fab["c_des_src"]),
        ),
        packaging_defaults=_packaging_params(document.get("packaging", {})),
        design_defaults=_design_params(document.get("design", {})),
        alpha=alpha,
        c_material=c_material,
    )


def database_to_dict(db: TechDatabase) -> Dict[str, Any]:
    """JSON form of a database; `database_from_dict` reads it back unchanged."""
    nodes = {}
    for node in sorted(db.nodes):
        params = db.nodes[node]
        nodes[node.name] = {
            "feature_index": node.feature_index,
            "d0": params.d0,
            "alpha": params.alpha,
            "dt": dict(params.dt),
            "eta_eq": params.eta_eq,
            "epa": params.epa,
            "c_gas": params.c_gas,
            "c_material": params.c_material,
            "eta_eda": params.eta_eda,
        }
    design = asdict(db.design_defaults)
    design["reuse"] = sorted(db.design_defaults.reuse)
    return {
        "alpha": db.alpha,
        "c_material": db.c_material,
        "fab": asdict(db.fab),
        "nodes": nodes,
        "packaging": asdict(db.packaging_defaults),
        "design": design,
    }


def load_database(
    path: Optional[PathLike] = None,
    allow_out_of_range: bool = False,
) -> TechDatabase:
    """
    Load and validate a technology database.

    Args:
        path: JSON file; resolved through `resolve_db_path` when omitted
        allow_out_of_range: Accept out-of-range values with a warning instead of failing

    Returns:
        Immutable TechDatabase

    Raises:
        DatabaseParseError: If the file is missing, unreadable or malformed
        ParameterValidationError: If a value is out of range
    """
    db_path = resolve_db_path(path)
    document = _read_json(db_path, "Database")
    _check_schema(document, AppConfig.DB_SCHEMA_PATH, db_path, "Database")
    try:
        db = database_from_dict(document)
    except (TypeError, ValueError) as exc:
        raise DatabaseParseError(f"Database file {db_path} has an invalid value: {exc}") from exc

    validate_database(db, strict=not allow_out_of_range)
    logger.info("loaded %d technology nodes from %s", len(db.nodes), db_path)
    return db


def save_database(db: TechDatabase, path: PathLike) -> Path:
    """Write a database as JSON, replacing any existing file atomically."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(database_to_dict(db), handle, indent=2)
        os.replace(tmp_name, target)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return target


def _chiplet(raw: Dict[str, Any]) -> Chiplet:
    return Chiplet(
        name=raw["name"],
        design_type=raw["type"],
        n_t=float(raw["mtransistors"]),
        node=raw["node"],
        extra_area=float(raw.get("extra_area", 0.0)),
        width=raw.get("width"),
        height=raw.get("height"),
    )


def system_from_dict(
    document: Dict[str, Any],
    db: TechDatabase,
    name: str = "system",
) -> SystemSpec:
    """Build a SystemSpec, layering its package and design overrides on the database defaults."""
    connectivity = document.get("connectivity")
    if connectivity is not None:
        connectivity = tuple(tuple(pair) for pair in connectivity)
    return SystemSpec(
        name=document.get("name", name),
        chiplets=tuple(_chiplet(raw) for raw in document["chiplets"]),
        package=_packaging_params(document.get("package", {}), db.packaging_defaults),
        design=_design_params(document.get("design", {}), db.design_defaults),
        connectivity=connectivity,
        logic_block=document.get("logic_block"),
    )


def load_system(path: PathLike, db: TechDatabase, allow_out_of_range: bool = False) -> SystemSpec:
    """
    Load a system description and check it against the database.

    Raises:
        DatabaseParseError: If the file is missing or malformed
        ParameterValidationError: If a value is invalid or a reference does not resolve
    """
    system_path = Path(path)
    document = _read_json(system_path, "System")
    _check_schema(document, AppConfig.SYSTEM_SCHEMA_PATH, system_path, "System")
    try:
        spec = system_from_dict(document, db, name=system_path.stem)
    except (TypeError, ValueError) as exc:
        raise DatabaseParseError(f"System file {system_path} has an invalid value: {exc}") from exc

    validate_system(spec, db, strict=not allow_out_of_range)
    logger.info("loaded system '%s' with %d chiplets", spec.name, len(spec.chiplets))
    return spec
