"""
Heterogeneous-integration packaging carbon.

    RDL fan-out        C = L_RDL · EPLA_RDL · C_pkg,src · A_pkg / Y(A_pkg)
    silicon bridges    C = N · L_b · EPLA_b · C_pkg,src · A_b / Y(A_b)
    passive interposer C = L_int · EPLA_RDL · C_pkg,src · A_pkg / Y(A_pkg)
    active interposer  C = [η_eq·C_pkg,src·EPA·((1−f)·A_int + f·A_active)
                            + (C_gas + C_material)·A_int] / Y(A_int)

Areas enter the formulas in cm²; yields use the packaging node's defect density.
The package substrate itself is not counted. Monolithic dies carry a fixed
package constant instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Optional, Sequence, Tuple

from app_constants import Architectures, DesignTypes
from config import FloorplanConfig, PackagingConfig
from data.errors import InfeasibleConfigurationError, ParameterValidationError
from data.floorplan import Adjacency, FloorplanResult
from data.manufacturing import MM2_PER_CM2, Chiplet, cfpa, core_area, die_area, die_yield
from data.techdb import TechDatabase, density, lookup

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]


@dataclass(frozen=True)
class PackagingParams:
    architecture: str = Architectures.RDL_FANOUT
    node: str = "65nm"
    l_rdl: int = 3
    epla_rdl: float = 0.05  # kWh/cm²/layer
    l_bridge: int = 4
    epla_bridge: float = 0.25
    bridge_range: float = 2.0  # mm
    bridge_area: float = 4.0  # mm² per bridge
    l_int: Optional[int] = None  # falls back to l_rdl
    f_feol: float = 0.5
    noc_ports: int = 5
    noc_flit_width: int = 512  # bits
    k_router: float = 40.0  # transistors per bit-port
    phy_area_frac: float = 0.01
    c_pkg_fixed: float = 150.0  # g
    spacing: float = FloorplanConfig.DEFAULT_SPACING  # mm

    @property
    def interposer_layers(self) -> int:
        return self.l_int if self.l_int is not None else self.l_rdl


@dataclass(frozen=True)
class PackageResult:
    architecture: str
    c_package: float
    c_comm: float
    package_area: float
    whitespace: float = 0.0
    chiplet_area_deltas: Dict[str, float] = field(default_factory=dict)
    bridge_count: Optional[int] = None

    @property
    def c_hi(self) -> float:
        return self.c_package + self.c_comm


def layered_cfp(layers: float, epla: float, c_src: float, area: float, yield_: float) -> float:
    """Per-layer, per-area packaging carbon for `area` in mm²."""
    return layers * epla * c_src * (area / MM2_PER_CM2) / yield_


def _packaging_fab(db: TechDatabase):
    # Interposer silicon is made with packaging-fab energy
    return replace(db.fab, c_mfg_src=db.fab.c_pkg_src)


def rdl_cfp(package_area: float, pp: PackagingParams, db: TechDatabase) -> float:
    """
    Carbon of an RDL fan-out package.

    Args:
        package_area: Package footprint from the floorplan, mm²
        pp: Packaging parameters (layer count, energy per layer and area, node)
        db: Technology database supplying the packaging node and intensity

    Returns:
        Carbon in g CO₂, with the yield of the packaging node at `package_area`
    """
    params = lookup(db, pp.node)
    yield_ = die_yield(package_area, params)
    return layered_cfp(pp.l_rdl, pp.epla_rdl, db.fab.c_pkg_src, package_area, yield_)


def passive_interposer_cfp(package_area: float, pp: PackagingParams, db: TechDatabase) -> float:
    """
    Carbon of a passive interposer: metal layers only, costed like RDL layers.

    Args:
        package_area: Interposer footprint, mm²
        pp: Packaging parameters; `l_int` falls back to `l_rdl`
        db: Technology database

    Returns:
        Carbon in g CO₂
    """
    params = lookup(db, pp.node)
    yield_ = die_yield(package_area, params)
    return layered_cfp(pp.interposer_layers, pp.epla_rdl, db.fab.c_pkg_src, package_area, yield_)


def active_interposer_cfp(
    package_area: float,
    active_area: float,
    pp: PackagingParams,
    db: TechDatabase,
) -> float:
    """
    Carbon of an active interposer spanning `package_area` with `active_area` of FEOL.

    Both areas are in mm². BEOL energy is spent over the whole interposer, FEOL
    energy only where routers and repeaters sit.
    """
    params = lookup(db, pp.node)
    a_int = package_area / MM2_PER_CM2
    a_active = active_area / MM2_PER_CM2
    energy = (
        params.eta_eq
        * db.fab.c_pkg_src
        * (params.epa * (1.0 - pp.f_feol) * a_int + params.epa * pp.f_feol * a_active)
    )
    materials = (params.c_gas + params.c_material) * a_int
    return (energy + materials) / die_yield(package_area, params)


def _normalize_pairs(pairs: Iterable[Sequence[str]]) -> Dict[frozenset, Pair]:
    normalized: Dict[frozenset, Pair] = {}
    for pair in pairs:
        a, b = pair
        normalized.setdefault(frozenset((a, b)), (a, b))
    return normalized


def bridge_count(
    adjacencies: Iterable[Adjacency],
    connectivity: Optional[Iterable[Sequence[str]]],
    bridge_range: float,
) -> int:
    """
    Number of silicon bridges needed to serve the linked chiplet pairs.

    Each linked pair needs ceil(shared edge / range) bridges, at least one. When
    `connectivity` is None every physically adjacent pair is linked.

    Raises:
        InfeasibleConfigurationError: If a linked pair does not share an edge
    """
    if bridge_range <= 0:
        raise ParameterValidationError("bridge_range", bridge_range, "> 0")

    overlaps = {frozenset((adj.a, adj.b)): adj.overlap for adj in adjacencies}
    if connectivity is None:
        required = {key: tuple(sorted(key)) for key in overlaps}
    else:
        required = _normalize_pairs(connectivity)

    total = 0
    for key, pair in required.items():
        overlap = overlaps.get(key, 0.0)
        if overlap <= 0.0:
            raise InfeasibleConfigurationError(
                f"chiplets {pair[0]} and {pair[1]} must be bridged but are not adjacent"
            )
        ratio = overlap / bridge_range - PackagingConfig.BRIDGE_CEIL_TOLERANCE
        total += max(1, math.ceil(ratio))
    return total


def bridge_cfp(n_bridges: int, pp: PackagingParams, db: TechDatabase) -> float:
    """
    Carbon of `n_bridges` silicon bridges.

    Args:
        n_bridges: Bridge count, usually from bridge_count
        pp: Packaging parameters (bridge layers, energy per layer, bridge area)
        db: Technology database

    Returns:
        Carbon in g CO₂, linear in `n_bridges`; each bridge yields at its own area
    """
    params = lookup(db, pp.node)
    yield_ = die_yield(pp.bridge_area, params)
    per_bridge = layered_cfp(pp.l_bridge, pp.epla_bridge, db.fab.c_pkg_src, pp.bridge_area, yield_)
    return n_bridges * per_bridge


def router_transistors(pp: PackagingParams) -> float:
    return pp.noc_ports * pp.noc_flit_width * pp.k_router


def router_area(pp: PackagingParams, node: str, db: TechDatabase) -> float:
    """NoC router area in mm² when built at `node`."""
    params = lookup(db, node)
    dt = density(params, DesignTypes.LOGIC, node)
    return router_transistors(pp) / (dt * 1e6)


def comm_cfp(
    architecture: str,
    chiplets: Sequence[Chiplet],
    pp: PackagingParams,
    db: TechDatabase,
) -> Tuple[float, Dict[str, float]]:
    """
    Inter-die communication overhead.

    Returns:
        (c_comm in g CO₂, area added to each chiplet's die in mm²). Passive
        interposers put a router on every chiplet; active interposers host the
        routers and pay for them directly; RDL and bridge packages add a PHY
        fraction to every die; monolithic dies need nothing.
    """
    if architecture == Architectures.PASSIVE_INTERPOSER:
        return 0.0, {c.name: router_area(pp, c.node, db) for c in chiplets}

    if architecture == Architectures.ACTIVE_INTERPOSER:
        params = lookup(db, pp.node)
        total_area = len(chiplets) * router_area(pp, pp.node, db)
        per_area = cfpa(die_yield(total_area, params), params, _packaging_fab(db))
        return per_area * total_area / MM2_PER_CM2, {}

    if architecture in (Architectures.RDL_FANOUT, Architectures.SILICON_BRIDGE):
        return 0.0, {
            c.name: pp.phy_area_frac * core_area(c, lookup(db, c.node)) for c in chiplets
        }

    if architecture == Architectures.MONOLITHIC:
        return 0.0, {}

    raise ParameterValidationError("architecture", architecture, str(Architectures.ALL))


def package_cfp(
    chiplets: Sequence[Chiplet],
    floorplan: Optional[FloorplanResult],
    pp: PackagingParams,
    db: TechDatabase,
    connectivity: Optional[Iterable[Sequence[str]]] = None,
    comm: Optional[Tuple[float, Dict[str, float]]] = None,
) -> PackageResult:
    """
    Packaging carbon for the chosen architecture.

    Args:
        chiplets: Chiplets without communication area deltas
        floorplan: Floorplan over the chiplets including their deltas; may be None
            for monolithic packages
        pp: Packaging parameters
        db: Technology database
        connectivity: Pairs that bridges must link; None links every adjacent pair
        comm: Precomputed result of comm_cfp, recomputed when omitted

    Returns:
        PackageResult with C_HI split into package and communication parts
    """
    architecture = pp.architecture
    c_comm, deltas = comm if comm is not None else comm_cfp(architecture, chiplets, pp, db)

    if architecture == Architectures.MONOLITHIC:
        if floorplan is not None:
            area = floorplan.package_area
        else:
            area = sum(die_area(c, lookup(db, c.node)) for c in chiplets)
        return PackageResult(
            architecture=architecture,
            c_package=pp.c_pkg_fixed,
            c_comm=c_comm,
            package_area=area,
            chiplet_area_deltas=deltas,
        )

    if floorplan is None:
        raise ParameterValidationError("floorplan", None, f"required for {architecture}")

    n_bridges: Optional[int] = None
    if architecture == Architectures.RDL_FANOUT:
        c_package = rdl_cfp(floorplan.package_area, pp, db)
    elif architecture == Architectures.SILICON_BRIDGE:
        n_bridges = bridge_count(floorplan.adjacencies, connectivity, pp.bridge_range)
        c_package = bridge_cfp(n_bridges, pp, db)
    elif architecture == Architectures.PASSIVE_INTERPOSER:
        c_package = passive_interposer_cfp(floorplan.package_area, pp, db)
    elif architecture == Architectures.ACTIVE_INTERPOSER:
        active_area = len(chiplets) * router_area(pp, pp.node, db)
        c_package = active_interposer_cfp(floorplan.package_area, active_area, pp, db)
    else:
        raise ParameterValidationError("architecture", architecture, str(Architectures.ALL))

    logger.debug(
        "%s package: area=%.2f mm² c_package=%.2f g c_comm=%.4f g",
        architecture,
        floorplan.package_area,
        c_package,
        c_comm,
    )
    return PackageResult(
        architecture=architecture,
        c_package=c_package,
        c_comm=c_comm,
        package_area=floorplan.package_area,
        whitespace=floorplan.whitespace,
        chiplet_area_deltas=deltas,
        bridge_count=n_bridges,
    )
