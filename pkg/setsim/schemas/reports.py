"""Pydantic schemas for JSON reports."""
from typing import Optional

from pydantic import BaseModel

from ..core.ratios import RatioReport


class RatioPayload(BaseModel):
    process: str  # "dfg" | "sfg"
    ratio: float
    ideal: float
    correction_factor: float
    closed_form: Optional[float] = None
    closed_form_approximate: bool = False
    delta_k_s: float
    delta_k_i: float
    delta_k_p: Optional[float] = None
    t_nodes: int
    achieved_tolerance: float
    warnings: list[str] = []

    @classmethod
    def from_report(cls, report: RatioReport) -> "RatioPayload":
        return cls(
            process=report.process.value,
            ratio=report.ratio,
            ideal=report.ideal,
            correction_factor=report.correction_factor,
            closed_form=report.closed_form,
            closed_form_approximate=report.closed_form_approximate,
            delta_k_s=report.delta_k_s,
            delta_k_i=report.delta_k_i,
            delta_k_p=report.delta_k_p,
            t_nodes=report.t_nodes,
            achieved_tolerance=report.achieved_tolerance,
            warnings=list(report.warnings),
        )


class ProbePayload(BaseModel):
    k_s: float
    k_i: float
    k_p: float


class RatiosRunPayload(BaseModel):
    scenario: str
    tolerance: float
    probe: ProbePayload
    dfg: RatioPayload
    sfg: RatioPayload
    warnings: list[str] = []
