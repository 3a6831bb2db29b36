"""
Scenario Module
A complete simulation setup: waveguide model, process inputs, probe
wavenumbers and quadrature control, plus density evaluation on it.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, InvalidProcessError
from .kernels import Process, ProcessInputs
from .logging_config import get_logger
from .model import WaveguideModel
from .observables import (
    NumberDensityReport,
    dfg_spectrum,
    pair_density,
    photon_density,
    sfg_spectrum,
    spdc_biphoton,
)
from .quadrature import QuadratureConfig

# Logger for this module
logger = get_logger(__name__)


@dataclass(frozen=True)
class ProbePoints:
    """Wavenumbers at which densities and ratios are read out."""
    ks: float   # signal (F)
    ki: float   # idler (F)
    kp: float   # pump (SH)


@dataclass(frozen=True)
class Scenario:
    """Model plus the inputs of every process it defines."""
    name: str
    model: WaveguideModel
    probe: ProbePoints
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    dfg: Optional[ProcessInputs] = None
    sfg: Optional[ProcessInputs] = None
    spdc: Optional[ProcessInputs] = None

    def __post_init__(self):
        for process, inputs in ((Process.DFG, self.dfg), (Process.SFG, self.sfg), (Process.SPDC, self.spdc)):
            if inputs is not None and inputs.process is not process:
                raise InvalidProcessError(
                    f"{process.value} slot holds {inputs.process.value} inputs"
                )

    @property
    def processes(self) -> tuple[Process, ...]:
        return tuple(
            process
            for process, inputs in ((Process.SPDC, self.spdc), (Process.DFG, self.dfg), (Process.SFG, self.sfg))
            if inputs is not None
        )

    def inputs_for(self, process: Process) -> ProcessInputs:
        """
        Inputs of one process.

        Raises:
            ConfigError: the scenario does not define that process
        """
        inputs = {Process.DFG: self.dfg, Process.SFG: self.sfg, Process.SPDC: self.spdc}[process]
        if inputs is None:
            raise ConfigError(f"scenario '{self.name}' defines no {process.value} inputs")
        return inputs

    def refined(self, factor: int) -> "Scenario":
        """Scenario on k grids with the spacing divided by factor."""
        model = self.model.refined(factor)
        moved = {
            name: inputs.on_grids(model.grids) if inputs is not None else None
            for name, inputs in (("dfg", self.dfg), ("sfg", self.sfg), ("spdc", self.spdc))
        }
        return dataclasses.replace(self, model=model, **moved)

    def with_quadrature(self, config: QuadratureConfig) -> "Scenario":
        return dataclasses.replace(self, quadrature=config)


def compute_densities(scenario: Scenario, config: Optional[QuadratureConfig] = None) -> NumberDensityReport:
    """
    N^DFG_sing(ki), N^SFG_sing(kp) and N^SPDC_pair(ks, ki) for every process
    the scenario defines.
    """
    config = config or scenario.quadrature
    model, probe = scenario.model, scenario.probe
    values: dict[str, float] = {}
    nodes = 0
    tolerance = 0.0

    if scenario.spdc is not None:
        biphoton = spdc_biphoton(model, scenario.spdc, config)
        values["spdc_pair"] = pair_density(biphoton, probe.ks, probe.ki)
        nodes = max(nodes, biphoton.nodes)
        tolerance = max(tolerance, biphoton.achieved_tolerance)
    if scenario.dfg is not None:
        spectrum = dfg_spectrum(model, scenario.dfg, config)
        values["dfg_single"] = photon_density(spectrum, probe.ki)
        nodes = max(nodes, spectrum.nodes)
        tolerance = max(tolerance, spectrum.achieved_tolerance)
    if scenario.sfg is not None:
        spectrum = sfg_spectrum(model, scenario.sfg, config)
        values["sfg_single"] = photon_density(spectrum, probe.kp)
        nodes = max(nodes, spectrum.nodes)
        tolerance = max(tolerance, spectrum.achieved_tolerance)

    logger.info("Scenario '%s': densities %s", scenario.name, values)
    return NumberDensityReport(
        processes=scenario.processes,
        nodes=nodes,
        achieved_tolerance=tolerance,
        **values,
    )
