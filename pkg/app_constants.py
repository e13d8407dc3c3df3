"""Application-wide constants to eliminate magic strings."""


class DesignTypes:
    """Area-scaling classes a chiplet can belong to."""

    LOGIC = "logic"
    MEMORY = "memory"
    ANALOG = "analog"

    ALL = (LOGIC, MEMORY, ANALOG)
    # Configuration labels list nodes in this order, e.g. "(7,14,10)"
    LABEL_ORDER = (LOGIC, ANALOG, MEMORY)


class Architectures:
    """Packaging architecture identifiers."""

    RDL_FANOUT = "rdl_fanout"
    SILICON_BRIDGE = "silicon_bridge"
    PASSIVE_INTERPOSER = "passive_interposer"
    ACTIVE_INTERPOSER = "active_interposer"
    MONOLITHIC = "monolithic"

    ALL = (RDL_FANOUT, SILICON_BRIDGE, PASSIVE_INTERPOSER, ACTIVE_INTERPOSER, MONOLITHIC)
    HETEROGENEOUS = (RDL_FANOUT, SILICON_BRIDGE, PASSIVE_INTERPOSER, ACTIVE_INTERPOSER)
    INTERPOSERS = (PASSIVE_INTERPOSER, ACTIVE_INTERPOSER)


class PackageFlags:
    """Short `--package` flag values accepted by the CLI."""

    RDL = "rdl"
    EMIB = "emib"
    PASSIVE = "passive"
    ACTIVE = "active"
    MONO = "mono"

    TO_ARCHITECTURE = {
        RDL: Architectures.RDL_FANOUT,
        EMIB: Architectures.SILICON_BRIDGE,
        PASSIVE: Architectures.PASSIVE_INTERPOSER,
        ACTIVE: Architectures.ACTIVE_INTERPOSER,
        MONO: Architectures.MONOLITHIC,
    }


class CutOrientations:
    """Slicing cut identifiers."""

    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


class Stages:
    """Evaluation stages used to tag errors."""

    COMM = "comm"
    AREA = "area"
    FLOORPLAN = "floorplan"
    PACKAGE = "package"
    MANUFACTURING = "manufacturing"
    DESIGN = "design"


class Statuses:
    """Sweep entry status values."""

    OK = "ok"
    INFEASIBLE = "infeasible"


class OutputFormats:
    """Report formats."""

    CSV = "csv"
    JSON = "json"
    XLSX = "xlsx"

    ALL = (CSV, JSON, XLSX)
    SUFFIXES = {".csv": CSV, ".json": JSON, ".xlsx": XLSX}


class ReportColumns:
    """Column names of the tabular report."""

    CONFIG_LABEL = "config_label"
    N_CHIPLETS = "n_chiplets"
    ARCHITECTURE = "architecture"
    STATUS = "status"
    MFG_PREFIX = "c_mfg_"
    C_PACKAGE = "c_package"
    C_COMM = "c_comm"
    C_HI = "c_hi"
    C_DES = "c_des"
    C_TOTAL = "c_total"
    PACKAGE_AREA = "package_area_mm2"
    WHITESPACE = "whitespace_mm2"
    BRIDGE_COUNT = "bridge_count"
    ERROR = "error"

    LEADING = (CONFIG_LABEL, N_CHIPLETS, ARCHITECTURE, STATUS)
    TRAILING = (
        C_PACKAGE,
        C_COMM,
        C_HI,
        C_DES,
        C_TOTAL,
        PACKAGE_AREA,
        WHITESPACE,
        BRIDGE_COUNT,
        ERROR,
    )


class ExitCodes:
    """Process exit codes of the CLI."""

    OK = 0
    USAGE = 2
    VALIDATION = 3
    INFEASIBLE = 4
