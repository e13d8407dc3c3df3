"""
Per-die area, yield and manufacturing carbon.

    area  = n_t / dt[design_type] + extra_area                    (mm²)
    Y     = (1 + (area/100)·d0/α)^(−α)                            negative binomial
    CFPA  = (η_eq·C_mfg,src·EPA + C_gas + C_material) / Y          (g CO₂/cm²)
    C_mfg = CFPA · area/100                                        (g CO₂)

Areas are kept in mm² and converted to cm² only where a per-cm² parameter applies.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional

import numpy as np

from data.techdb import FabProfile, ProcessParams, TechDatabase, density, lookup

logger = logging.getLogger(__name__)

MM2_PER_CM2 = 100.0


@dataclass(frozen=True)
class Chiplet:
    """One die of a system; `node` is a node name and `n_t` is in Mtransistors."""

    name: str
    design_type: str
    n_t: float
    node: str
    extra_area: float = 0.0
    width: Optional[float] = None
    height: Optional[float] = None

    def with_extra_area(self, delta: float) -> Chiplet:
        if not delta:
            return self
        return replace(self, extra_area=self.extra_area + delta)


@dataclass(frozen=True)
class MfgResult:
    area: float  # mm²
    yield_: float
    cfpa: float  # g/cm²
    carbon: float  # g


def core_area(chiplet: Chiplet, params: ProcessParams) -> float:
    """Area of the chiplet's transistors alone, mm²."""
    return chiplet.n_t / density(params, chiplet.design_type, chiplet.node)


def die_area(chiplet: Chiplet, params: ProcessParams) -> float:
    """Silicon area of a chiplet in mm², including router/PHY additions."""
    return core_area(chiplet, params) + chiplet.extra_area


def die_yield(area: float, params: ProcessParams) -> float:
    """Negative binomial die yield for an area in mm²."""
    return (1.0 + (area / MM2_PER_CM2) * params.d0 / params.alpha) ** (-params.alpha)


def cfpa_components(yield_: float, params: ProcessParams, fab: FabProfile) -> Dict[str, float]:
    """Yield-adjusted CFPA split into energy, gas and material parts, g/cm²."""
    return {
        "energy": params.eta_eq * fab.c_mfg_src * params.epa / yield_,
        "gas": params.c_gas / yield_,
        "material": params.c_material / yield_,
    }


def cfpa(yield_: float, params: ProcessParams, fab: FabProfile) -> float:
    """Carbon footprint per unit area, g CO₂/cm²."""
    per_area = params.eta_eq * fab.c_mfg_src * params.epa + params.c_gas + params.c_material
    return per_area / yield_


def mfg_carbon(area: float, params: ProcessParams, fab: FabProfile) -> MfgResult:
    """Manufacturing carbon of a die of the given area at one node."""
    yield_ = die_yield(area, params)
    per_area = cfpa(yield_, params, fab)
    return MfgResult(
        area=area,
        yield_=yield_,
        cfpa=per_area,
        carbon=per_area * area / MM2_PER_CM2,
    )


def chiplet_mfg_cfp(chiplet: Chiplet, db: TechDatabase) -> MfgResult:
    """
    Manufacturing carbon of one chiplet at its own node.

    Args:
        chiplet: Chiplet with transistor count, design type, node and any added area
        db: Technology database

    Returns:
        MfgResult with die area, yield, CFPA and carbon

    Raises:
        ResolutionError: If the node or its density for the design type is unknown
    """
    params = lookup(db, chiplet.node)
    result = mfg_carbon(die_area(chiplet, params), params, db.fab)
    logger.debug(
        "%s @ %s: area=%.3f mm² yield=%.4f carbon=%.1f g",
        chiplet.name,
        chiplet.node,
        result.area,
        result.yield_,
        result.carbon,
    )
    return result


def mfg_carbon_curve(areas, params: ProcessParams, fab: FabProfile) -> np.ndarray:
    """
    Manufacturing carbon for many die areas at once.

    Args:
        areas: Array-like of die areas, mm²
        params: Process parameters of the node
        fab: Carbon intensities

    Returns:
        Array of carbon values, g CO₂, same shape as `areas`
    """
    area = np.asarray(areas, dtype=float)
    yield_ = (1.0 + (area / MM2_PER_CM2) * params.d0 / params.alpha) ** (-params.alpha)
    per_area = params.eta_eq * fab.c_mfg_src * params.epa + params.c_gas + params.c_material
    return per_area / yield_ * area / MM2_PER_CM2
