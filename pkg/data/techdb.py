"""Technology parameter database: per-node process data and fab carbon intensities.

Nodes are discrete; there is no interpolation between them. A database is built
once by `data.loader.load_database` and never mutated afterwards, so it can be
shared freely between concurrent evaluations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Union

from config import FabSources
from data.errors import ResolutionError

if TYPE_CHECKING:
    from data.design import DesignParams
    from data.packaging import PackagingParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class TechnologyNode:
    """A process node; smaller feature_index means more advanced."""

    feature_index: int
    name: str


@dataclass(frozen=True)
class ProcessParams:
    """
    Manufacturing and design parameters of one technology node.

    Attributes:
        d0: Defect density, defects/cm²
        alpha: Defect clustering parameter of the yield model
        dt: Transistor density per design type, Mtr/mm²
        eta_eq: Equipment efficiency applied to the fab energy
        epa: Fab energy per unit area, kWh/cm²
        c_gas: Process gas emissions, g/cm²
        c_material: Material procurement emissions, g/cm²
        eta_eda: EDA productivity factor dividing design hours
    """

    d0: float
    alpha: float
    dt: Dict[str, float]
    eta_eq: float
    epa: float
    c_gas: float
    c_material: float
    eta_eda: float


@dataclass(frozen=True)
class FabProfile:
    """Carbon intensities of the energy feeding each activity, g CO₂/kWh."""

    c_mfg_src: float
    c_pkg_src: float
    c_des_src: float

    def scaled(self, factor: float) -> FabProfile:
        return FabProfile(
            c_mfg_src=self.c_mfg_src * factor,
            c_pkg_src=self.c_pkg_src * factor,
            c_des_src=self.c_des_src * factor,
        )


@dataclass(frozen=True)
class TechDatabase:
    """
    Per-node process parameters plus the defaults a system starts from.

    Attributes:
        nodes: Process parameters keyed by node, most advanced first when sorted
        fab: Carbon intensities of manufacturing, packaging and design energy
        packaging_defaults: Packaging parameters systems inherit
        design_defaults: Design parameters systems inherit
        alpha: Default clustering parameter
        c_material: Default material emissions, g/cm²
    """

    nodes: Dict[TechnologyNode, ProcessParams]
    fab: FabProfile
    packaging_defaults: PackagingParams
    design_defaults: DesignParams
    alpha: float = 3.0
    c_material: float = 500.0

    @property
    def node_names(self) -> List[str]:
        """Node names ordered from most to least advanced."""
        return [node.name for node in sorted(self.nodes)]


NodeRef = Union[str, TechnologyNode]


def _node_name(node: NodeRef) -> str:
    return node.name if isinstance(node, TechnologyNode) else str(node)


def resolve_node(db: TechDatabase, node: NodeRef) -> TechnologyNode:
    """Return the database's node entry for a name, or raise ResolutionError."""
    name = _node_name(node)
    for candidate in db.nodes:
        if candidate.name == name:
            return candidate
    known = ", ".join(db.node_names)
    raise ResolutionError(f"unknown technology node '{name}' (known: {known})")


def lookup(db: TechDatabase, node: NodeRef) -> ProcessParams:
    """
    Return the stored parameters for a node.

    Args:
        db: Loaded technology database
        node: Node name (e.g. "7nm") or TechnologyNode

    Returns:
        The exact ProcessParams stored for the node

    Raises:
        ResolutionError: If the node is not in the database
    """
    return db.nodes[resolve_node(db, node)]


def density(params: ProcessParams, design_type: str, node_name: str = "") -> float:
    """Transistor density for a design type, Mtr/mm²."""
    try:
        return params.dt[design_type]
    except KeyError:
        where = f" at {node_name}" if node_name else ""
        raise ResolutionError(f"no transistor density for design type '{design_type}'{where}")


def most_advanced(db: TechDatabase, names: Iterable[str]) -> str:
    """Name of the most advanced node among `names`."""
    resolved = [resolve_node(db, name) for name in names]
    if not resolved:
        raise ResolutionError("no technology nodes given")
    return min(resolved).name


def check_d0_ordering(db: TechDatabase) -> List[str]:
    """
    Warn when an older node has a higher defect density than a newer one.

    Returns:
        Names of nodes whose d0 exceeds that of the next more advanced node
    """
    offenders: List[str] = []
    ordered = sorted(db.nodes)
    for newer, older in zip(ordered, ordered[1:]):
        if db.nodes[older].d0 > db.nodes[newer].d0:
            offenders.append(older.name)
            logger.warning(
                "d0 of %s (%.3f) exceeds d0 of more advanced %s (%.3f)",
                older.name,
                db.nodes[older].d0,
                newer.name,
                db.nodes[newer].d0,
            )
    return offenders


def with_fab(db: TechDatabase, fab: FabProfile) -> TechDatabase:
    """
    Copy of a database with different energy carbon intensities.

    Args:
        db: Database to copy
        fab: Intensities for manufacturing, packaging and design energy

    Returns:
        New TechDatabase sharing every other field with `db`
    """
    return replace(db, fab=fab)


def with_fab_source(
    db: TechDatabase,
    intensity: Union[str, float],
    targets: Optional[Iterable[str]] = None,
) -> TechDatabase:
    """
    Rebuild the database with one carbon intensity applied to selected activities.

    Args:
        db: Source database
        intensity: g CO₂/kWh, or the name of a preset in config.FabSources
        targets: Any of "mfg", "pkg", "des"; all three when omitted
    """
    if isinstance(intensity, str):
        try:
            intensity = FabSources.INTENSITY[intensity]
        except KeyError:
            known = ", ".join(FabSources.INTENSITY)
            raise ResolutionError(f"unknown fab energy source '{intensity}' (known: {known})")
    selected = set(targets or ("mfg", "pkg", "des"))
    unknown = selected - {"mfg", "pkg", "des"}
    if unknown:
        raise ResolutionError(f"unknown fab activities: {sorted(unknown)}")
    fab = FabProfile(
        c_mfg_src=intensity if "mfg" in selected else db.fab.c_mfg_src,
        c_pkg_src=intensity if "pkg" in selected else db.fab.c_pkg_src,
        c_des_src=intensity if "des" in selected else db.fab.c_des_src,
    )
    return with_fab(db, fab)
