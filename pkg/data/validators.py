"""Range and consistency checks for databases and system descriptions."""

from __future__ import annotations

import logging
from typing import Optional, Tuple

from app_constants import Architectures, DesignTypes
from config import FloorplanConfig, ParameterRanges
from data.design import DesignParams
from data.errors import ParameterValidationError, ResolutionError
from data.manufacturing import die_area
from data.packaging import PackagingParams
from data.system import SystemSpec
from data.techdb import FabProfile, ProcessParams, TechDatabase, check_d0_ordering, lookup

logger = logging.getLogger(__name__)


def _fmt_range(bounds: Tuple[float, float]) -> str:
    return f"[{bounds[0]:g},{bounds[1]:g}]"


def _report(error: ParameterValidationError, strict: bool) -> None:
    if strict:
        raise error
    logger.warning("accepted out-of-range value: %s", error)


def validate_range(
    field: str,
    value: float,
    bounds: Tuple[float, float],
    strict: bool = True,
) -> None:
    """
    Check that `value` lies in the closed interval `bounds`.

    Args:
        field: Parameter name used in the error message
        value: Value to check
        bounds: (low, high), inclusive
        strict: Raise on violation; when False only log a warning

    Raises:
        ParameterValidationError: If out of range and strict
    """
    low, high = bounds
    if not low <= value <= high:
        _report(ParameterValidationError(field, value, _fmt_range(bounds)), strict)


def validate_unit_interval(field: str, value: float, strict: bool = True) -> None:
    """Check that `value` lies in (0, 1]."""
    if not 0.0 < value <= 1.0:
        _report(ParameterValidationError(field, value, "(0,1]"), strict)


def validate_positive(field: str, value: Optional[float]) -> None:
    if value is None or value <= 0:
        raise ParameterValidationError(field, value, "> 0")


def validate_non_negative(field: str, value: float) -> None:
    if value < 0:
        raise ParameterValidationError(field, value, ">= 0")


def validate_process_params(node: str, params: ProcessParams, strict: bool = True) -> None:
    prefix = f"nodes.{node}"
    validate_range(f"{prefix}.d0", params.d0, ParameterRanges.D0, strict)
    validate_positive("alpha", params.alpha)
    for design_type in DesignTypes.ALL:
        if design_type not in params.dt:
            raise ResolutionError(f"{prefix}.dt is missing design type '{design_type}'")
    for design_type, value in params.dt.items():
        if design_type not in DesignTypes.ALL:
            raise ParameterValidationError(f"{prefix}.dt", design_type, str(DesignTypes.ALL))
        validate_range(f"{prefix}.dt.{design_type}", value, ParameterRanges.DENSITY, strict)
    validate_unit_interval(f"{prefix}.eta_eq", params.eta_eq, strict)
    validate_range(f"{prefix}.epa", params.epa, ParameterRanges.EPA, strict)
    validate_range(f"{prefix}.c_gas", params.c_gas, ParameterRanges.C_GAS, strict)
    validate_positive(f"{prefix}.c_material", params.c_material)
    validate_unit_interval(f"{prefix}.eta_eda", params.eta_eda, strict)


def validate_fab(fab: FabProfile, strict: bool = True) -> None:
    for field in ("c_mfg_src", "c_pkg_src", "c_des_src"):
        value = getattr(fab, field)
        validate_range(f"fab.{field}", value, ParameterRanges.CARBON_INTENSITY, strict)


def validate_packaging_params(pp: PackagingParams, strict: bool = True) -> None:
    if pp.architecture not in Architectures.ALL:
        raise ParameterValidationError(
            "packaging.architecture", pp.architecture, str(Architectures.ALL)
        )
    if pp.node not in ParameterRanges.PACKAGING_NODES:
        _report(
            ParameterValidationError(
                "packaging.node", pp.node, "/".join(ParameterRanges.PACKAGING_NODES)
            ),
            strict,
        )
    validate_range("packaging.l_rdl", pp.l_rdl, ParameterRanges.LAYERS, strict)
    validate_range("packaging.epla_rdl", pp.epla_rdl, ParameterRanges.EPLA_RDL, strict)
    validate_range("packaging.l_bridge", pp.l_bridge, ParameterRanges.LAYERS, strict)
    validate_range("packaging.epla_bridge", pp.epla_bridge, ParameterRanges.EPLA_BRIDGE, strict)
    if pp.l_int is not None:
        validate_positive("packaging.l_int", pp.l_int)
    validate_positive("packaging.bridge_range", pp.bridge_range)
    validate_positive("packaging.bridge_area", pp.bridge_area)
    validate_range("packaging.f_feol", pp.f_feol, (0.0, 1.0))
    validate_positive("packaging.noc_ports", pp.noc_ports)
    validate_non_negative("packaging.noc_flit_width", pp.noc_flit_width)
    validate_non_negative("packaging.k_router", pp.k_router)
    validate_non_negative("packaging.phy_area_frac", pp.phy_area_frac)
    validate_non_negative("packaging.c_pkg_fixed", pp.c_pkg_fixed)
    validate_non_negative("packaging.spacing", pp.spacing)
    if pp.spacing > 0:
        validate_range("packaging.spacing", pp.spacing, ParameterRanges.SPACING, strict)


def validate_design_params(dp: DesignParams) -> None:
    validate_positive("design.t_spr_ref", dp.t_spr_ref)
    validate_positive("design.ref_gates", dp.ref_gates)
    validate_non_negative("design.t_analyze_frac", dp.t_analyze_frac)
    if (dp.t_verif is None) == (dp.verif_share is None):
        raise ParameterValidationError(
            "design.t_verif/verif_share",
            (dp.t_verif, dp.verif_share),
            "exactly one of the two",
        )
    if dp.t_verif is not None:
        validate_non_negative("design.t_verif", dp.t_verif)
    else:
        if not 0.0 <= dp.verif_share < 1.0:
            raise ParameterValidationError("design.verif_share", dp.verif_share, "[0,1)")
    validate_positive("design.n_des", dp.n_des)
    validate_positive("design.p_des", dp.p_des)
    validate_positive("design.n_parts", dp.n_parts)
    validate_positive("design.spr_exponent", dp.spr_exponent)
    validate_positive("design.transistors_per_gate", dp.transistors_per_gate)


def validate_database(db: TechDatabase, strict: bool = True) -> None:
    """
    Check every field of a database against its admissible range.

    A non-monotone defect-density ordering is only warned about.
    """
    if not db.nodes:
        raise ParameterValidationError("nodes", {}, "at least one node")
    names = [node.name for node in db.nodes]
    if len(set(names)) != len(names):
        raise ParameterValidationError("nodes", names, "unique names")
    indices = [node.feature_index for node in db.nodes]
    if len(set(indices)) != len(indices):
        raise ParameterValidationError("nodes.feature_index", indices, "unique values")

    for node, params in db.nodes.items():
        validate_process_params(node.name, params, strict)
    validate_fab(db.fab, strict)
    validate_packaging_params(db.packaging_defaults, strict)
    lookup(db, db.packaging_defaults.node)
    validate_design_params(db.design_defaults)
    check_d0_ordering(db)


def validate_system(spec: SystemSpec, db: TechDatabase, strict: bool = True) -> None:
    """
    Check a system description against a database.

    Raises:
        ParameterValidationError: For bad values or duplicate names
        ResolutionError: For unknown nodes, chiplets or design types
    """
    if not spec.chiplets:
        raise ParameterValidationError("chiplets", [], "at least one chiplet")
    names = [c.name for c in spec.chiplets]
    if len(set(names)) != len(names):
        raise ParameterValidationError("chiplets", names, "unique names")

    for chiplet in spec.chiplets:
        if chiplet.design_type not in DesignTypes.ALL:
            raise ResolutionError(
                f"chiplet '{chiplet.name}' has unknown design type '{chiplet.design_type}'"
            )
        validate_positive(f"chiplets.{chiplet.name}.mtransistors", chiplet.n_t)
        validate_non_negative(f"chiplets.{chiplet.name}.extra_area", chiplet.extra_area)
        params = lookup(db, chiplet.node)
        if (chiplet.width is None) != (chiplet.height is None):
            raise ParameterValidationError(
                f"chiplets.{chiplet.name}.width/height",
                (chiplet.width, chiplet.height),
                "both or neither",
            )
        if chiplet.width is not None:
            core = die_area(chiplet, params)
            if chiplet.width * chiplet.height < core * (1.0 - FloorplanConfig.TOLERANCE):
                raise ParameterValidationError(
                    f"chiplets.{chiplet.name}.width*height",
                    chiplet.width * chiplet.height,
                    f">= core area {core:.3f} mm²",
                )

    if spec.connectivity is not None:
        known = set(names)
        for pair in spec.connectivity:
            if len(pair) != 2 or pair[0] == pair[1]:
                raise ParameterValidationError("connectivity", pair, "pairs of distinct chiplets")
            for name in pair:
                if name not in known:
                    raise ResolutionError(f"connectivity references unknown chiplet '{name}'")

    if spec.logic_block is not None:
        spec.chiplet(spec.logic_block)
    for name in spec.design.reuse:
        if name not in names:
            raise ResolutionError(f"design.reuse references unknown chiplet '{name}'")

    validate_packaging_params(spec.package, strict)
    lookup(db, spec.package.node)
    validate_design_params(spec.design)
