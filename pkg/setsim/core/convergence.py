"""
Convergence Module
Self-refinement tables for the k grids and the time rule.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidParameterError
from .logging_config import get_logger
from .quadrature import QuadratureConfig
from .scenario import Scenario, compute_densities

# Logger for this module
logger = get_logger(__name__)


@dataclass(frozen=True)
class RefinementRow:
    """Densities at one refinement level."""
    axis: str                   # "k" or "t"
    level: int
    n_f: int
    n_sh: int
    t_nodes: int                # nodes of the time rule actually used
    densities: dict[str, float]
    relative_change: float      # max over densities against the previous level; nan on the first


def _relative_change(current: dict[str, float], previous: dict[str, float]) -> float:
    change = 0.0
    for name, value in current.items():
        reference = previous[name]
        difference = abs(value - reference)
        if difference == 0.0:
            continue
        change = max(change, difference / max(abs(value), abs(reference)))
    return change


def convergence_report(
    scenario: Scenario, config: Optional[QuadratureConfig] = None, levels: int = 3
) -> list[RefinementRow]:
    """
    Densities under successive halving of the k spacing, then under
    successive doubling of a fixed time rule.

    k rows use the adaptive time rule of ``config``; t rows keep the base
    k grids and run the rule at exactly 2, 4, 8, ... times the base nodes.

    Args:
        scenario: Scenario to refine
        config: Time-quadrature control (default: the scenario's)
        levels: Rows per axis

    Returns:
        k rows followed by t rows
    """
    if levels < 1:
        raise InvalidParameterError(f"levels must be >= 1, got {levels}")
    config = config or scenario.quadrature
    rows: list[RefinementRow] = []

    previous: Optional[dict[str, float]] = None
    for level in range(levels):
        refined = scenario.refined(2 ** level)
        report = compute_densities(refined, config)
        densities = report.densities()
        change = math.nan if previous is None else _relative_change(densities, previous)
        rows.append(RefinementRow(
            "k", level, refined.model.grids.f.n, refined.model.grids.sh.n, report.nodes, densities, change,
        ))
        logger.info("k level %d: change %.3e with %d t nodes", level, change, report.nodes)
        previous = densities

    previous = None
    base = max(1, config.base_nodes // 2)
    for level in range(levels):
        # infinite tolerance stops at the first doubling, i.e. 2 * base_nodes
        fixed = QuadratureConfig(tolerance=math.inf, max_doublings=0, base_nodes=base * 2 ** level)
        report = compute_densities(scenario, fixed)
        densities = report.densities()
        change = math.nan if previous is None else _relative_change(densities, previous)
        rows.append(RefinementRow(
            "t", level, scenario.model.grids.f.n, scenario.model.grids.sh.n, report.nodes, densities, change,
        ))
        logger.info("t level %d (%d nodes): change %.3e", level, report.nodes, change)
        previous = densities

    return rows
