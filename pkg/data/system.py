"""
System-level carbon: total embodied footprint and the design-space sweep.

    C_tot = Σ C_mfg,i + C_des + C_HI,   C_HI = C_package + C_comm
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from app_constants import Architectures, DesignTypes, Stages, Statuses
from config import SweepConfig
from data.design import DesignParams, system_design_cfp
from data.errors import (
    CarbonModelError,
    InfeasibleConfigurationError,
    ParameterValidationError,
    ResolutionError,
)
from data.floorplan import Block, FloorplanResult, build_floorplan
from data.manufacturing import Chiplet, chiplet_mfg_cfp, die_area, mfg_carbon
from data.packaging import PackagingParams, comm_cfp, package_cfp
from data.techdb import TechDatabase, lookup, most_advanced

logger = logging.getLogger(__name__)

MONOLITHIC_KEY = "monolithic"

Pair = Tuple[str, str]


@dataclass(frozen=True)
class SystemSpec:
    """
    Architectural description of a system.

    `connectivity` lists chiplet pairs that must be linked; None means every
    physically adjacent pair is linked.
    """

    name: str
    chiplets: Tuple[Chiplet, ...]
    package: PackagingParams
    design: DesignParams
    connectivity: Optional[Tuple[Pair, ...]] = None
    logic_block: Optional[str] = None

    def chiplet(self, name: str) -> Chiplet:
        for chiplet in self.chiplets:
            if chiplet.name == name:
                return chiplet
        raise ResolutionError(f"system '{self.name}' has no chiplet '{name}'")


@dataclass(frozen=True)
class CarbonReport:
    system: str
    architecture: str
    per_chiplet_mfg: Dict[str, float]
    c_package: float
    c_comm: float
    c_des: float
    c_total: float
    package_area: float
    whitespace: float
    bridge_count: Optional[int] = None
    config_label: str = ""
    n_chiplets: int = 0

    @property
    def c_mfg(self) -> float:
        return sum(self.per_chiplet_mfg.values())

    @property
    def c_hi(self) -> float:
        return self.c_package + self.c_comm


@dataclass(frozen=True)
class SweepSpec:
    node_choices: Mapping[str, Tuple[str, ...]]
    nc_range: Tuple[int, ...] = (1,)
    architectures: Tuple[str, ...] = (Architectures.RDL_FANOUT,)


@dataclass(frozen=True)
class SweepEntry:
    label: str
    n_chiplets: int
    architecture: str
    report: Optional[CarbonReport] = None
    error: Optional[str] = None

    @property
    def status(self) -> str:
        return Statuses.OK if self.report is not None else Statuses.INFEASIBLE


@dataclass(frozen=True)
class MonolithComparison:
    chiplet: CarbonReport
    monolithic: CarbonReport
    ratio: float
    reduction_pct: float


@dataclass
class _Terms:
    per_chiplet_mfg: Dict[str, float] = field(default_factory=dict)
    c_package: float = 0.0
    c_comm: float = 0.0
    c_des: float = 0.0


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except CarbonModelError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def node_label(node: str) -> str:
    """'7nm' -> '7'."""
    return node[:-2] if node.endswith("nm") else node


def config_label(spec: SystemSpec) -> str:
    """Node assignment as '(logic,analog,memory)', e.g. '(7,14,10)'."""
    parts = []
    for design_type in DesignTypes.LABEL_ORDER:
        nodes = [c.node for c in spec.chiplets if c.design_type == design_type]
        parts.append(node_label(nodes[0]) if nodes else "-")
    return "(" + ",".join(parts) + ")"


def _comm_design_node(spec: SystemSpec, db: TechDatabase) -> Optional[str]:
    architecture = spec.package.architecture
    if architecture == Architectures.ACTIVE_INTERPOSER:
        return spec.package.node
    if architecture in Architectures.HETEROGENEOUS and len(spec.chiplets) > 1:
        return most_advanced(db, (c.node for c in spec.chiplets))
    return None


def _report(
    spec: SystemSpec,
    terms: _Terms,
    package_area: float,
    whitespace: float,
    bridge_count: Optional[int],
) -> CarbonReport:
    c_total = sum(terms.per_chiplet_mfg.values()) + terms.c_des + terms.c_package + terms.c_comm
    return CarbonReport(
        system=spec.name,
        architecture=spec.package.architecture,
        per_chiplet_mfg=terms.per_chiplet_mfg,
        c_package=terms.c_package,
        c_comm=terms.c_comm,
        c_des=terms.c_des,
        c_total=c_total,
        package_area=package_area,
        whitespace=whitespace,
        bridge_count=bridge_count,
        config_label=config_label(spec),
        n_chiplets=len(spec.chiplets),
    )


def _evaluate_monolithic(spec: SystemSpec, db: TechDatabase) -> CarbonReport:
    nodes = sorted({c.node for c in spec.chiplets})
    if len(nodes) != 1:
        raise InfeasibleConfigurationError(
            f"a monolithic die needs one technology node, got {', '.join(nodes)}",
            stage=Stages.AREA,
        )
    with _stage(Stages.AREA):
        params = lookup(db, nodes[0])
        area = sum(die_area(c, params) for c in spec.chiplets)
    with _stage(Stages.PACKAGE):
        package = package_cfp(spec.chiplets, None, spec.package, db)
    with _stage(Stages.MANUFACTURING):
        die = mfg_carbon(area, params, db.fab)
    with _stage(Stages.DESIGN):
        design = system_design_cfp(spec.chiplets, spec.design, db)

    terms = _Terms(
        per_chiplet_mfg={MONOLITHIC_KEY: die.carbon},
        c_package=package.c_package,
        c_comm=package.c_comm,
        c_des=design.amortized_per_part,
    )
    return _report(spec, terms, package_area=area, whitespace=0.0, bridge_count=None)


def _grown(spec: SystemSpec, deltas: Mapping[str, float]) -> List[Chiplet]:
    """Chiplets with their communication area; explicit outlines grow to fit it."""
    grown = []
    for chiplet in spec.chiplets:
        delta = deltas.get(chiplet.name, 0.0)
        resized = chiplet.with_extra_area(delta)
        if delta and chiplet.width is not None and chiplet.height is not None:
            scale = math.sqrt(1.0 + delta / (chiplet.width * chiplet.height))
            resized = replace(
                resized, width=chiplet.width * scale, height=chiplet.height * scale
            )
        grown.append(resized)
    return grown


def _blocks(chiplets: Sequence[Chiplet], db: TechDatabase) -> List[Block]:
    return [Block(c.name, die_area(c, lookup(db, c.node)), c.width, c.height) for c in chiplets]


def system_floorplan(spec: SystemSpec, db: TechDatabase) -> FloorplanResult:
    """Floorplan of the chiplets as packaged, communication area included."""
    architecture = spec.package.architecture
    if architecture == Architectures.MONOLITHIC:
        raise ParameterValidationError(
            "architecture",
            architecture,
            f"one of {Architectures.HETEROGENEOUS}",
            stage=Stages.FLOORPLAN,
        )
    with _stage(Stages.COMM):
        _, deltas = comm_cfp(architecture, spec.chiplets, spec.package, db)
    with _stage(Stages.AREA):
        blocks = _blocks(_grown(spec, deltas), db)
    with _stage(Stages.FLOORPLAN):
        return build_floorplan(blocks, spec.package.spacing)


def evaluate(spec: SystemSpec, db: TechDatabase) -> CarbonReport:
    """
    Total embodied carbon of one configuration.

    Pipeline: communication overhead -> die areas -> floorplan -> package carbon ->
    per-chiplet manufacturing -> design -> sum. Errors carry the failing stage.

    Raises:
        CarbonModelError: Subclass describing the failure, with `stage` set
    """
    if spec.package.architecture == Architectures.MONOLITHIC:
        return _evaluate_monolithic(spec, db)

    with _stage(Stages.COMM):
        comm = comm_cfp(spec.package.architecture, spec.chiplets, spec.package, db)
    c_comm, deltas = comm

    with _stage(Stages.AREA):
        grown = _grown(spec, deltas)
        blocks = _blocks(grown, db)

    with _stage(Stages.FLOORPLAN):
        floorplan = build_floorplan(blocks, spec.package.spacing)

    with _stage(Stages.PACKAGE):
        package = package_cfp(
            spec.chiplets,
            floorplan,
            spec.package,
            db,
            connectivity=spec.connectivity,
            comm=comm,
        )

    with _stage(Stages.MANUFACTURING):
        per_chiplet = {c.name: chiplet_mfg_cfp(c, db).carbon for c in grown}

    with _stage(Stages.DESIGN):
        design = system_design_cfp(
            spec.chiplets,
            spec.design,
            db,
            comm_node=_comm_design_node(spec, db),
            pp=spec.package,
        )

    terms = _Terms(
        per_chiplet_mfg=per_chiplet,
        c_package=package.c_package,
        c_comm=c_comm,
        c_des=design.amortized_per_part,
    )
    report = _report(
        spec,
        terms,
        package_area=package.package_area,
        whitespace=package.whitespace,
        bridge_count=package.bridge_count,
    )
    logger.debug("%s [%s]: c_total=%.4g g", spec.name, spec.package.architecture, report.c_total)
    return report


def with_architecture(spec: SystemSpec, architecture: str) -> SystemSpec:
    return replace(spec, package=replace(spec.package, architecture=architecture))


def assign_nodes(spec: SystemSpec, assignment: Mapping[str, str]) -> SystemSpec:
    """Move every chiplet of each listed design type to the given node."""
    chiplets = tuple(
        replace(c, node=assignment[c.design_type]) if c.design_type in assignment else c
        for c in spec.chiplets
    )
    return replace(spec, chiplets=chiplets)


def as_monolithic(spec: SystemSpec, db: TechDatabase, node: Optional[str] = None) -> SystemSpec:
    """The same blocks fused onto one die, by default at the most advanced node used."""
    target = node or most_advanced(db, (c.node for c in spec.chiplets))
    fused = replace(spec, chiplets=tuple(replace(c, node=target) for c in spec.chiplets))
    return with_architecture(fused, Architectures.MONOLITHIC)


def _logic_chiplet(spec: SystemSpec) -> Chiplet:
    if spec.logic_block is not None:
        return spec.chiplet(spec.logic_block)
    logic = [c for c in spec.chiplets if c.design_type == DesignTypes.LOGIC]
    if len(logic) != 1:
        raise ResolutionError(
            f"system '{spec.name}' needs exactly one logic chiplet to split, found {len(logic)}"
        )
    return logic[0]


def split_logic(spec: SystemSpec, n: int) -> SystemSpec:
    """
    Replace the logic block by `n` chiplets with equal transistor counts.

    Links to the logic block move to its first part and the parts are chained.
    Reuse of the logic block carries over to every part.
    """
    if n < 1:
        raise ParameterValidationError("n", n, ">= 1")
    if n == 1:
        return spec
    logic = _logic_chiplet(spec)

    parts = [
        replace(
            logic,
            name=f"{logic.name}_{i}",
            n_t=logic.n_t / n,
            extra_area=logic.extra_area / n,
            width=None,
            height=None,
        )
        for i in range(n)
    ]
    chiplets: List[Chiplet] = []
    for chiplet in spec.chiplets:
        chiplets.extend(parts if chiplet.name == logic.name else [chiplet])

    connectivity = spec.connectivity
    if connectivity is not None:
        head = parts[0].name
        rewired = [
            tuple(head if name == logic.name else name for name in pair) for pair in connectivity
        ]
        chain = [(a.name, b.name) for a, b in zip(parts, parts[1:])]
        connectivity = tuple(rewired + chain)

    design = spec.design
    if logic.name in design.reuse:
        reuse = (design.reuse - {logic.name}) | {p.name for p in parts}
        design = replace(design, reuse=frozenset(reuse))

    return replace(
        spec,
        chiplets=tuple(chiplets),
        connectivity=connectivity,
        design=design,
        logic_block=None,
    )


def _grid(spec: SystemSpec, sweep_spec: SweepSpec) -> List[Tuple[Dict[str, str], int, str]]:
    if not sweep_spec.nc_range or not sweep_spec.architectures:
        raise ParameterValidationError("sweep", sweep_spec, "non-empty nc_range and architectures")
    present = {c.design_type for c in spec.chiplets}
    for design_type, nodes in sweep_spec.node_choices.items():
        if design_type not in present:
            raise ParameterValidationError(
                "node_choices", design_type, f"design types of '{spec.name}': {sorted(present)}"
            )
        if not nodes:
            raise ParameterValidationError(f"node_choices.{design_type}", nodes, "non-empty")

    types = [t for t in DesignTypes.LABEL_ORDER if t in sweep_spec.node_choices]
    grid = []
    for combo in itertools.product(*(sweep_spec.node_choices[t] for t in types)):
        assignment = dict(zip(types, combo))
        for nc in sweep_spec.nc_range:
            for architecture in sweep_spec.architectures:
                grid.append((assignment, nc, architecture))
    return grid


def _evaluate_point(
    spec: SystemSpec,
    db: TechDatabase,
    assignment: Dict[str, str],
    nc: int,
    architecture: str,
) -> SweepEntry:
    configured = assign_nodes(spec, assignment)
    label = config_label(configured)
    try:
        point = split_logic(configured, nc)
        if architecture == Architectures.MONOLITHIC:
            point = as_monolithic(point, db)
        else:
            point = with_architecture(point, architecture)
        return SweepEntry(label, nc, architecture, report=evaluate(point, db))
    except CarbonModelError as exc:
        logger.info("infeasible %s nc=%d %s: %s", label, nc, architecture, exc)
        return SweepEntry(label, nc, architecture, error=str(exc))


def sweep(
    spec: SystemSpec,
    sweep_spec: SweepSpec,
    db: TechDatabase,
    max_workers: int = SweepConfig.MAX_WORKERS,
) -> List[SweepEntry]:
    """
    Evaluate every combination of node assignment, chiplet count and architecture.

    Entries come back in grid order (node assignment, then count, then
    architecture) regardless of how many workers evaluate them. Failing points
    are kept as infeasible entries.
    """
    grid = _grid(spec, sweep_spec)
    logger.info("sweeping %d configurations of '%s'", len(grid), spec.name)

    def run(point: Tuple[Dict[str, str], int, str]) -> SweepEntry:
        return _evaluate_point(spec, db, *point)

    if max_workers <= 1:
        return [run(point) for point in grid]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, grid))


def best_entry(entries: Sequence[SweepEntry]) -> SweepEntry:
    """Feasible entry with the lowest total carbon; the earliest wins ties."""
    feasible = [entry for entry in entries if entry.report is not None]
    if not feasible:
        raise InfeasibleConfigurationError("no feasible configuration in sweep")
    return min(feasible, key=lambda entry: entry.report.c_total)


def compare_to_monolithic(
    spec: SystemSpec,
    db: TechDatabase,
    node: Optional[str] = None,
) -> MonolithComparison:
    """Evaluate a chiplet system next to the same blocks on one monolithic die."""
    chiplet_report = evaluate(spec, db)
    mono_report = evaluate(as_monolithic(spec, db, node), db)
    ratio = chiplet_report.c_total / mono_report.c_total
    return MonolithComparison(
        chiplet=chiplet_report,
        monolithic=mono_report,
        ratio=ratio,
        reduction_pct=(1.0 - ratio) * 100.0,
    )
