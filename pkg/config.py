"""Application-wide configuration settings."""

from pathlib import Path

from app_constants import ReportColumns

PROJECT_ROOT = Path(__file__).parent


class ParameterRanges:
    """Admissible ranges for database parameters, as (low, high) inclusive."""

    D0 = (0.07, 0.3)  # defects/cm²
    DENSITY = (5.0, 150.0)  # Mtr/mm²
    EPA = (0.8, 3.5)  # kWh/cm²
    C_GAS = (100.0, 500.0)  # g/cm²
    CARBON_INTENSITY = (30.0, 700.0)  # g/kWh
    EPLA_RDL = (0.05, 0.2)  # kWh/cm²/layer
    EPLA_BRIDGE = (0.1, 0.35)
    LAYERS = (3, 4)
    SPACING = (0.1, 1.0)  # mm
    PACKAGING_NODES = ("22nm", "28nm", "40nm", "65nm")


class FloorplanConfig:
    """Slicing floorplan defaults."""

    DEFAULT_SPACING = 0.5  # mm
    ADJACENCY_GAP_FACTOR = 1.5
    TOLERANCE = 1e-9
    FILL_MAX_ITERATIONS = 200
    FILL_REL_TOLERANCE = 1e-13


class DesignConfig:
    """Design-effort model defaults."""

    TRANSISTORS_PER_GATE = 4
    HOURS_TO_KWH_PER_WATT = 1.0 / 1000.0


class PackagingConfig:
    """Packaging model defaults."""

    BRIDGE_CEIL_TOLERANCE = 1e-9


class SweepConfig:
    """Sweep engine settings."""

    MAX_WORKERS = 4


class ReportConfig:
    """Report writer settings."""

    LEADING_COLUMNS = list(ReportColumns.LEADING)
    TRAILING_COLUMNS = list(ReportColumns.TRAILING)
    JSON_INDENT = 2
    XLSX_SHEET_NAME = "carbon"


class FabSources:
    """Carbon intensity presets for fab and design-compute energy, g CO₂/kWh."""

    COAL = "coal"
    NATURAL_GAS = "natural_gas"
    WORLD_GRID = "world_grid"
    SOLAR = "solar"
    WIND = "wind"

    INTENSITY = {
        COAL: 700.0,
        NATURAL_GAS: 490.0,
        WORLD_GRID: 475.0,
        SOLAR: 48.0,
        WIND: 30.0,
    }


class AppConfig:
    """File locations and environment settings."""

    DATA_DIR = PROJECT_ROOT / "data"
    RAW_DATA_DIR = DATA_DIR / "raw"
    SCHEMA_DIR = RAW_DATA_DIR / "schemas"
    SYSTEMS_DIR = RAW_DATA_DIR / "systems"
    DEFAULT_DB_PATH = RAW_DATA_DIR / "default_db.json"
    DB_SCHEMA_PATH = SCHEMA_DIR / "techdb.schema.json"
    SYSTEM_SCHEMA_PATH = SCHEMA_DIR / "system.schema.json"

    DB_ENV_VAR = "CHIPLET_CARBON_DB"
    LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
