"""
Design-phase carbon.

    gates   = n_t·10⁶ / transistors_per_gate
    t_spr   = t_spr_ref · (gates / ref_gates)^spr_exponent
    t_des   = (t_verif + (t_spr + t_analyze)·N_des) / η_EDA        CPU-hours
    C_des,i = t_des · P_des/1000 · C_des,src                        g CO₂
    C_des   = (Σ C_des,i + C_des,comm) / N_P
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Sequence

from config import DesignConfig
from data.manufacturing import Chiplet
from data.packaging import PackagingParams, router_transistors
from data.techdb import ProcessParams, TechDatabase, lookup

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesignParams:
    t_spr_ref: float = 24.0  # CPU-hours per SP&R run of ref_gates
    ref_gates: float = 7e5
    t_analyze_frac: float = 0.25
    t_verif: Optional[float] = None  # CPU-hours
    verif_share: Optional[float] = 0.65
    n_des: int = 100
    p_des: float = 10.0  # W per core
    n_parts: int = 200_000
    reuse: FrozenSet[str] = field(default_factory=frozenset)
    spr_exponent: float = 1.0
    transistors_per_gate: float = DesignConfig.TRANSISTORS_PER_GATE

    def verification_hours(self, loop_hours: float) -> float:
        """Verification CPU-hours given the SP&R + analysis hours of all iterations."""
        if self.t_verif is not None:
            return self.t_verif
        return self.verif_share / (1.0 - self.verif_share) * loop_hours


@dataclass(frozen=True)
class DesignResult:
    per_chiplet_carbon: Dict[str, float]
    comm_carbon: float
    total_unamortized: float
    amortized_per_part: float
    n_parts: int


def gate_count(n_t: float, dp: DesignParams) -> float:
    """Gate count of `n_t` Mtransistors."""
    return n_t * 1e6 / dp.transistors_per_gate


def spr_time(gates: float, dp: DesignParams) -> float:
    """CPU-hours of one synthesis/place-and-route run."""
    return dp.t_spr_ref * (gates / dp.ref_gates) ** dp.spr_exponent


def _design_hours(gates: float, dp: DesignParams, eta_eda: float) -> float:
    t_spr = spr_time(gates, dp)
    t_analyze = dp.t_analyze_frac * t_spr
    loop = (t_spr + t_analyze) * dp.n_des
    return (dp.verification_hours(loop) + loop) / eta_eda


def design_time(chiplet: Chiplet, dp: DesignParams, params: ProcessParams) -> float:
    """Total design CPU-hours for a chiplet, scaled by the node's EDA productivity."""
    return _design_hours(gate_count(chiplet.n_t, dp), dp, params.eta_eda)


def design_carbon(hours: float, p_des: float, c_src: float) -> float:
    """Carbon of `hours` CPU-hours at `p_des` W per core and `c_src` g/kWh."""
    return hours * p_des * DesignConfig.HOURS_TO_KWH_PER_WATT * c_src


def chiplet_design_cfp(chiplet: Chiplet, dp: DesignParams, db: TechDatabase) -> float:
    """
    Unamortized design carbon of one chiplet.

    Args:
        chiplet: Chiplet to design
        dp: Design parameters; chiplets listed in `dp.reuse` cost nothing
        db: Technology database supplying the node's EDA productivity

    Returns:
        Carbon in g CO₂
    """
    if chiplet.name in dp.reuse:
        return 0.0
    hours = design_time(chiplet, dp, lookup(db, chiplet.node))
    return design_carbon(hours, dp.p_des, db.fab.c_des_src)


def router_design_cfp(
    pp: PackagingParams,
    node: str,
    dp: DesignParams,
    db: TechDatabase,
) -> float:
    """Design carbon of one NoC router/NIC at `node`."""
    gates = router_transistors(pp) / dp.transistors_per_gate
    hours = _design_hours(gates, dp, lookup(db, node).eta_eda)
    return design_carbon(hours, dp.p_des, db.fab.c_des_src)


def system_design_cfp(
    chiplets: Sequence[Chiplet],
    dp: DesignParams,
    db: TechDatabase,
    comm_node: Optional[str] = None,
    pp: Optional[PackagingParams] = None,
) -> DesignResult:
    """
    Design carbon of a system, amortized over the manufactured parts.

    Args:
        chiplets: Chiplets of the system
        dp: Design parameters (reused chiplets contribute nothing)
        db: Technology database
        comm_node: Node of the inter-die router design; None when there is none
        pp: Packaging parameters describing the router, defaults from `db`

    Returns:
        DesignResult with unamortized per-chiplet values and the per-part total
    """
    per_chiplet = {c.name: chiplet_design_cfp(c, dp, db) for c in chiplets}
    comm = 0.0
    if comm_node is not None:
        comm = router_design_cfp(pp or db.packaging_defaults, comm_node, dp, db)

    total = sum(per_chiplet.values()) + comm
    logger.debug("design carbon %.4g g over %d parts", total, dp.n_parts)
    return DesignResult(
        per_chiplet_carbon=per_chiplet,
        comm_carbon=comm,
        total_unamortized=total,
        amortized_per_part=total / dp.n_parts,
        n_parts=dp.n_parts,
    )
