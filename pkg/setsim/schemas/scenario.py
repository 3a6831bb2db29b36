"""Pydantic schemas for scenario files."""
import cmath
import math
from pathlib import Path
from typing import Callable, Literal, Optional, TypeVar, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator, model_validator

from ..config import get_settings
from ..core.errors import ConfigError, SimulationError
from ..core.kernels import ProcessInputs
from ..core.logging_config import get_logger
from ..core.model import (
    Band,
    BandDispersion,
    CoherentInput,
    ConstantLoss,
    CouplingModel,
    DispersionRelation,
    EnvelopeKind,
    InteractionWindow,
    LossProfile,
    SpectralGrids,
    UnitMode,
    WaveguideModel,
    Waveform,
)
from ..core.quadrature import Grid1D, QuadratureConfig
from ..core.scenario import ProbePoints, Scenario
from ..services.tables import read_loss_table
from .common import ErrorDetail

# Logger for this module
logger = get_logger(__name__)

Built = TypeVar("Built")


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DispersionSection(StrictModel):
    v_F: float = Field(gt=0)
    v_SH: float = Field(gt=0)
    k_F0: float = 0.0
    k_SH0: float = 0.0
    omega_F0: float = 0.0
    omega_SH0: float = 0.0


class BandLossSection(StrictModel):
    """Exactly one of a constant rate or a `k beta` table path."""
    constant: Optional[float] = Field(default=None, ge=0)
    table: Optional[str] = None

    @model_validator(mode="after")
    def exactly_one(self):
        if (self.constant is None) == (self.table is None):
            raise ValueError("give exactly one of 'constant' or 'table'")
        return self


class LossSection(StrictModel):
    F: BandLossSection = Field(default_factory=lambda: BandLossSection(constant=0.0))
    SH: BandLossSection = Field(default_factory=lambda: BandLossSection(constant=0.0))


class CouplingSection(StrictModel):
    s0: float = Field(ge=0)
    envelope: Literal["constant", "gaussian", "sinc"] = "gaussian"
    width: Optional[float] = Field(default=None, gt=0)
    offset: float = 0.0

    @model_validator(mode="after")
    def width_for_shaped_envelope(self):
        if self.envelope != "constant" and self.width is None:
            raise ValueError(f"a {self.envelope} envelope needs 'width'")
        return self


class WindowSection(StrictModel):
    """Either T, or the waveguide length L with the input group velocity."""
    T: Optional[float] = Field(default=None, gt=0)
    L: Optional[float] = Field(default=None, gt=0)
    v_in: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def one_form(self):
        by_length = self.L is not None or self.v_in is not None
        if self.T is not None and by_length:
            raise ValueError("give either T or (L, v_in), not both")
        if self.T is None and (self.L is None or self.v_in is None):
            raise ValueError("give T, or both L and v_in")
        return self


class GridSection(StrictModel):
    min: float
    max: float
    n: int = Field(ge=2)

    @model_validator(mode="after")
    def ordered(self):
        if not self.max > self.min:
            raise ValueError("max must be greater than min")
        return self


class GridsSection(StrictModel):
    F: GridSection
    SH: GridSection


class QuadratureSection(StrictModel):
    tolerance: float = Field(default_factory=lambda: get_settings().tolerance, gt=0)
    max_doublings: int = Field(default_factory=lambda: get_settings().max_doublings, ge=0)
    base_nodes: int = Field(default_factory=lambda: get_settings().base_nodes, ge=2)


class FieldSection(StrictModel):
    """One coherent input field."""
    z_magnitude: float = Field(ge=0)
    z_phase: float = 0.0
    waveform: Literal["gaussian", "delta"]
    center: float
    width: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def width_matches_waveform(self):
        if self.waveform == "gaussian" and self.width is None:
            raise ValueError("a gaussian waveform needs 'width'")
        if self.waveform == "delta" and self.width is not None:
            raise ValueError("a delta waveform takes its width from the grid; drop 'width'")
        return self

    @property
    def z(self) -> complex:
        return cmath.rect(self.z_magnitude, self.z_phase)

    def build(self, band: Band, grid: Grid1D) -> CoherentInput:
        if self.waveform == "gaussian":
            waveform = Waveform.gaussian(band, self.center, self.width, grid)
        else:
            waveform = Waveform.grid_delta(band, self.center, grid)
        return CoherentInput(waveform, self.z)


class DfgInputs(StrictModel):
    seed: FieldSection
    pump: FieldSection


class SfgInputs(StrictModel):
    signal: FieldSection
    idler: FieldSection


class SpdcInputs(StrictModel):
    pump: FieldSection


class InputsSection(StrictModel):
    dfg: Optional[DfgInputs] = None
    sfg: Optional[SfgInputs] = None
    spdc: Optional[SpdcInputs] = None

    @model_validator(mode="after")
    def at_least_one(self):
        if self.dfg is None and self.sfg is None and self.spdc is None:
            raise ValueError("define inputs for at least one of dfg, sfg, spdc")
        return self


class ProbeSection(StrictModel):
    """Read-out wavenumbers; missing ones are taken from the input centers."""
    k_s: Optional[float] = None
    k_i: Optional[float] = None
    k_p: Optional[float] = None


class ScenarioConfig(StrictModel):
    name: Optional[str] = None
    units: Literal["SI", "nondimensional"] = "nondimensional"
    dispersion: DispersionSection
    loss: LossSection = Field(default_factory=LossSection)
    coupling: CouplingSection
    window: WindowSection
    grids: GridsSection
    quadrature: QuadratureSection = Field(default_factory=QuadratureSection)
    inputs: InputsSection
    probe: ProbeSection = Field(default_factory=ProbeSection)

    # directory that relative table paths are resolved against
    _base_dir: Path = PrivateAttr(default_factory=Path.cwd)
    _built: Optional[Scenario] = PrivateAttr(default=None)

    @field_validator("name")
    @classmethod
    def validate_name(cls, v):
        if v is not None and not v.strip():
            raise ValueError("name must not be blank")
        return v

    @property
    def built_scenario(self) -> Scenario:
        """Scenario built by parse_config, or a fresh one with probe checks."""
        if self._built is None:
            self._built = self.to_scenario()
        return self._built

    def to_scenario(self, require_probe: bool = True) -> Scenario:
        """
        Build the Scenario, reporting every construction failure at once.

        Probe points are only validated when require_probe is set; spectra
        never read them.

        Raises:
            ConfigError: one ErrorDetail per failing section
        """
        errors: list[ErrorDetail] = []

        def attempt(code: str, build: Callable[[], Built]) -> Optional[Built]:
            try:
                return build()
            except SimulationError as exc:
                errors.append(ErrorDetail(code=code, message=str(exc)))
                return None

        d = self.dispersion
        dispersion = attempt("dispersion", lambda: DispersionRelation(
            BandDispersion(d.k_F0, d.omega_F0, d.v_F),
            BandDispersion(d.k_SH0, d.omega_SH0, d.v_SH),
        ))
        loss_f = attempt("loss.F", lambda: self._band_loss(self.loss.F))
        loss_sh = attempt("loss.SH", lambda: self._band_loss(self.loss.SH))
        coupling = attempt("coupling", lambda: CouplingModel(
            strength=self.coupling.s0,
            envelope=EnvelopeKind(self.coupling.envelope),
            width=self.coupling.width if self.coupling.width is not None else 1.0,
            offset=self.coupling.offset,
        ))
        window = attempt("window", self._window)
        grid_f = attempt("grids.F", lambda: Grid1D(self.grids.F.min, self.grids.F.max, self.grids.F.n))
        grid_sh = attempt("grids.SH", lambda: Grid1D(self.grids.SH.min, self.grids.SH.max, self.grids.SH.n))
        q = self.quadrature
        quadrature = attempt("quadrature", lambda: QuadratureConfig(q.tolerance, q.max_doublings, q.base_nodes))
        self._raise_collected(errors)

        grids = SpectralGrids(grid_f, grid_sh)
        model = attempt("grids", lambda: WaveguideModel(
            dispersion=dispersion,
            loss=LossProfile(loss_f, loss_sh),
            coupling=coupling,
            window=window,
            grids=grids,
            units=UnitMode(self.units),
        ))

        dfg = sfg = spdc = None
        if self.inputs.dfg is not None:
            seed = attempt("inputs.dfg.seed", lambda: self.inputs.dfg.seed.build(Band.F, grid_f))
            pump = attempt("inputs.dfg.pump", lambda: self.inputs.dfg.pump.build(Band.SH, grid_sh))
            if seed is not None and pump is not None:
                dfg = ProcessInputs.dfg(seed, pump)
        if self.inputs.sfg is not None:
            signal = attempt("inputs.sfg.signal", lambda: self.inputs.sfg.signal.build(Band.F, grid_f))
            idler = attempt("inputs.sfg.idler", lambda: self.inputs.sfg.idler.build(Band.F, grid_f))
            if signal is not None and idler is not None:
                sfg = ProcessInputs.sfg(signal, idler)
        if self.inputs.spdc is not None:
            pump = attempt("inputs.spdc.pump", lambda: self.inputs.spdc.pump.build(Band.SH, grid_sh))
            if pump is not None:
                spdc = ProcessInputs.spdc(pump)

        probe = self._probe(grids, errors if require_probe else [])
        self._raise_collected(errors)

        return Scenario(
            name=self.name or "scenario",
            model=model,
            probe=probe,
            quadrature=quadrature,
            dfg=dfg,
            sfg=sfg,
            spdc=spdc,
        )

    # -----------------------------------------------------------------------

    def _band_loss(self, section: BandLossSection):
        if section.constant is not None:
            return ConstantLoss(section.constant)
        path = Path(section.table)
        if not path.is_absolute():
            path = self._base_dir / path
        return read_loss_table(path)

    def _window(self) -> InteractionWindow:
        if self.window.T is not None:
            return InteractionWindow.from_half_width(self.window.T)
        return InteractionWindow.from_length(self.window.L, self.window.v_in)

    def _probe(self, grids: SpectralGrids, errors: list[ErrorDetail]) -> ProbePoints:
        inputs = self.inputs
        k_s = _first(
            self.probe.k_s,
            inputs.sfg.signal.center if inputs.sfg else None,
            inputs.dfg.seed.center if inputs.dfg else None,
        )
        k_i = _first(self.probe.k_i, inputs.sfg.idler.center if inputs.sfg else None)
        k_p = _first(
            self.probe.k_p,
            inputs.spdc.pump.center if inputs.spdc else None,
            inputs.dfg.pump.center if inputs.dfg else None,
        )

        needs_pair = inputs.dfg is not None or inputs.spdc is not None
        required = [("probe.k_s", k_s, grids.f, needs_pair), ("probe.k_i", k_i, grids.f, needs_pair),
                    ("probe.k_p", k_p, grids.sh, inputs.sfg is not None)]
        for code, value, grid, needed in required:
            if value is None:
                if needed:
                    errors.append(ErrorDetail(code=code, message="not set and not implied by any input center"))
                continue
            try:
                grid.index_of(value)
            except SimulationError as exc:
                errors.append(ErrorDetail(code=code, message=str(exc)))

        def value_or_nan(v):
            return math.nan if v is None else float(v)

        return ProbePoints(value_or_nan(k_s), value_or_nan(k_i), value_or_nan(k_p))

    @staticmethod
    def _raise_collected(errors: list[ErrorDetail]) -> None:
        if errors:
            raise ConfigError(f"{len(errors)} invalid setting(s)", errors)


def _first(*values: Optional[float]) -> Optional[float]:
    return next((v for v in values if v is not None), None)


def _detail(error: dict) -> ErrorDetail:
    code = ".".join(str(part) for part in error["loc"]) or "scenario"
    return ErrorDetail(code=code, message=error["msg"])


def parse_config(path: Union[str, Path], require_probe: bool = True) -> ScenarioConfig:
    """
    Read and validate a scenario file.

    Args:
        path: YAML scenario file
        require_probe: Also check that the probe points are set and on the grids

    Returns:
        Validated ScenarioConfig; its built_scenario is ready

    Raises:
        ConfigError: missing file, malformed YAML, schema or model violations,
            with one ErrorDetail per violation
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}",
                          [ErrorDetail(code="path", message=f"{path} does not exist")])
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario file is not valid YAML: {path}",
                          [ErrorDetail(code="yaml", message=str(exc))]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"scenario file must hold a mapping: {path}",
                          [ErrorDetail(code="scenario", message="top level is not a mapping")])

    try:
        config = ScenarioConfig.model_validate(raw)
    except ValidationError as exc:
        details = [_detail(error) for error in exc.errors()]
        raise ConfigError(f"{len(details)} invalid setting(s) in {path}", details) from exc

    if config.name is None:
        config.name = path.stem
    config._base_dir = path.parent
    config._built = config.to_scenario(require_probe)
    logger.info("Parsed scenario '%s' from %s", config.name, path)
    return config


def load_scenario(
    path: Union[str, Path],
    tolerance: Optional[float] = None,
    require_probe: bool = True,
) -> Scenario:
    """Built scenario of parse_config, with an optional tolerance override."""
    scenario = parse_config(path, require_probe).built_scenario
    if tolerance is not None:
        q = scenario.quadrature
        try:
            override = QuadratureConfig(tolerance, q.max_doublings, q.base_nodes)
        except SimulationError as exc:
            raise ConfigError("invalid --tolerance", [ErrorDetail(code="tolerance", message=str(exc))]) from exc
        scenario = scenario.with_quadrature(override)
    return scenario
