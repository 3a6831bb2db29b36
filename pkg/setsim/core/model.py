"""
Model Module
Physical configuration of a chi-2 waveguide: dispersion, scattering loss,
nonlinear coupling, input waveforms, spectral grids and interaction window.

All objects are frozen dataclasses; nothing changes after construction.
"""

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy import constants

from .errors import GridError, InvalidParameterError
from .logging_config import get_logger
from .quadrature import ON_GRID_RTOL, Grid1D

# Logger for this module
logger = get_logger(__name__)

# Gaussian waveforms and envelopes must fit this many widths inside the grid
TRUNCATION_WIDTHS = 6.0

# Gaussian amplitudes below this fraction of the peak are left out of k sums
SUPPORT_CUTOFF = 1e-16

# Largest allowed gap between the analytic and grid norm of a gaussian
MAX_NORM_DEFECT = 1e-3

ArrayLike = Union[float, np.ndarray]


class Band(Enum):
    """Frequency band of a mode."""
    F = "F"     # fundamental
    SH = "SH"   # second harmonic


class UnitMode(Enum):
    """How quantities are interpreted."""
    SI = "SI"
    NONDIMENSIONAL = "nondimensional"  # time in units of T, rates in 1/T, hbar = 1


class EnvelopeKind(Enum):
    """Phase-matching envelope of the coupling."""
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"
    SINC = "sinc"


class ShapeKind(Enum):
    """Spectral shape of an input waveform."""
    GAUSSIAN = "gaussian"
    GRID_DELTA = "delta"


# ---------------------------------------------------------------------------
# Dispersion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BandDispersion:
    """Linear dispersion of one band: omega = omega0 + v (k - k0)."""
    k0: float       # center wavenumber
    omega0: float   # center angular frequency
    v: float        # group velocity

    def __post_init__(self):
        if not self.v > 0:
            raise InvalidParameterError(f"group velocity must be > 0, got {self.v}")

    def omega(self, k: ArrayLike) -> ArrayLike:
        return self.omega0 + self.v * (np.asarray(k, dtype=float) - self.k0)


@dataclass(frozen=True)
class DispersionRelation:
    f: BandDispersion
    sh: BandDispersion

    def for_band(self, band: Band) -> BandDispersion:
        return self.f if band is Band.F else self.sh


# ---------------------------------------------------------------------------
# Loss
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantLoss:
    """Same loss rate beta at every k."""
    beta: float = 0.0

    def __post_init__(self):
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise InvalidParameterError(f"loss rate must be >= 0, got {self.beta}")

    def evaluate(self, k: ArrayLike) -> ArrayLike:
        return np.full(np.shape(k), self.beta) if np.ndim(k) else self.beta

    @property
    def feature_scale(self) -> float:
        return math.inf


@dataclass(frozen=True)
class TableLoss:
    """Piecewise-linear loss rate over k, clamped outside the knots."""
    k_knots: tuple[float, ...]
    beta_knots: tuple[float, ...]

    def __post_init__(self):
        if len(self.k_knots) == 0 or len(self.k_knots) != len(self.beta_knots):
            raise InvalidParameterError("loss table needs matching, non-empty k and beta columns")
        if any(b <= a for a, b in zip(self.k_knots, self.k_knots[1:])):
            raise InvalidParameterError("loss table k knots must be strictly increasing")
        if any(not (b >= 0 and math.isfinite(b)) for b in self.beta_knots):
            raise InvalidParameterError("loss table rates must be finite and >= 0")

    def evaluate(self, k: ArrayLike) -> ArrayLike:
        value = np.interp(k, self.k_knots, self.beta_knots)
        return value if np.ndim(k) else float(value)

    @property
    def feature_scale(self) -> float:
        """Narrowest knot spacing across which the rate actually changes."""
        spans = [
            b - a
            for (a, b), (ya, yb) in zip(
                zip(self.k_knots, self.k_knots[1:]), zip(self.beta_knots, self.beta_knots[1:])
            )
            if ya != yb
        ]
        return min(spans) if spans else math.inf


BandLoss = Union[ConstantLoss, TableLoss]


@dataclass(frozen=True)
class LossProfile:
    f: BandLoss = field(default_factory=ConstantLoss)
    sh: BandLoss = field(default_factory=ConstantLoss)

    def for_band(self, band: Band) -> BandLoss:
        return self.f if band is Band.F else self.sh


# ---------------------------------------------------------------------------
# Coupling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingModel:
    """
    S(k1, k2, k) = s0 * pm(k1 + k2 - k - offset).

    ``width`` is the gaussian 1/e^(1/2) half-width for GAUSSIAN and the
    phase-matching length L for SINC, where pm = sin(dk L / 2) / (dk L / 2).
    """
    strength: float
    envelope: EnvelopeKind = EnvelopeKind.GAUSSIAN
    width: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if not (self.strength >= 0 and math.isfinite(self.strength)):
            raise InvalidParameterError(f"coupling strength must be >= 0, got {self.strength}")
        if self.envelope is not EnvelopeKind.CONSTANT and not self.width > 0:
            raise InvalidParameterError(f"envelope width must be > 0, got {self.width}")
        if self.envelope is EnvelopeKind.SINC:
            logger.warning("sinc phase matching changes sign; S is no longer real and positive")

    def phase_matching(self, mismatch: ArrayLike) -> ArrayLike:
        """Envelope pm evaluated at k1 + k2 - k - offset."""
        dk = np.asarray(mismatch, dtype=float)
        if self.envelope is EnvelopeKind.CONSTANT:
            value = np.ones_like(dk)
        elif self.envelope is EnvelopeKind.GAUSSIAN:
            value = np.exp(-0.5 * (dk / self.width) ** 2)
        else:
            value = np.sinc(dk * self.width / (2.0 * np.pi))
        return value if value.ndim else float(value)

    def evaluate(self, k1: ArrayLike, k2: ArrayLike, k: ArrayLike) -> ArrayLike:
        return self.strength * self.phase_matching(
            np.add(k1, k2) - np.asarray(k, dtype=float) - self.offset
        )

    @property
    def feature_scale(self) -> float:
        """Width of the narrowest structure of the envelope in k."""
        if self.envelope is EnvelopeKind.CONSTANT:
            return math.inf
        if self.envelope is EnvelopeKind.GAUSSIAN:
            return self.width
        return 2.0 * np.pi / self.width


# ---------------------------------------------------------------------------
# Interaction window
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InteractionWindow:
    """Symmetric interaction window t0 = -T, t1 = +T."""
    half_width: float
    length: Optional[float] = None  # waveguide length L, when built from (L, v_in)
    v_in: Optional[float] = None

    def __post_init__(self):
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise InvalidParameterError(f"window half-width T must be > 0, got {self.half_width}")

    @classmethod
    def from_half_width(cls, half_width: float) -> "InteractionWindow":
        return cls(half_width=half_width)

    @classmethod
    def from_length(cls, length: float, v_in: float) -> "InteractionWindow":
        """T = L / (2 v_in), so that t1 - t0 = L / v_in."""
        if not length > 0:
            raise InvalidParameterError(f"waveguide length must be > 0, got {length}")
        if not v_in > 0:
            raise InvalidParameterError(f"input group velocity must be > 0, got {v_in}")
        return cls(half_width=length / (2.0 * v_in), length=length, v_in=v_in)

    @property
    def t0(self) -> float:
        return -self.half_width

    @property
    def t1(self) -> float:
        return self.half_width

    @property
    def duration(self) -> float:
        """t1 - t0."""
        if self.length is not None and self.v_in is not None:
            return self.length / self.v_in
        return self.t1 - self.t0


# ---------------------------------------------------------------------------
# Grids and waveforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralGrids:
    """One uniform k grid per band."""
    f: Grid1D
    sh: Grid1D

    def for_band(self, band: Band) -> Grid1D:
        return self.f if band is Band.F else self.sh

    def refined(self, factor: int) -> "SpectralGrids":
        return SpectralGrids(self.f.refined(factor), self.sh.refined(factor))


@dataclass(frozen=True)
class Waveform:
    """
    Normalized spectral pulse shape phi(k) of one input field.

    GAUSSIAN: phi ~ exp(-(k - center)^2 / (4 sigma^2)), so |phi|^2 has rms
    width sigma; normalized by trapezoid quadrature on ``grid``.
    GRID_DELTA: a single bin at ``center`` of height 1 / sqrt(bin_width);
    the bin width is the one of the grid it was created on and survives
    grid refinement.
    """
    band: Band
    center: float
    shape: ShapeKind
    grid: Grid1D
    sigma: float = 0.0
    bin_width: float = 0.0
    _scale: float = field(default=1.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.shape is ShapeKind.GAUSSIAN:
            self._check_gaussian()
            analytic = self._gaussian(self.grid.points)
            norm = float(np.dot(self.grid.weights, analytic ** 2))
            if abs(norm - 1.0) > MAX_NORM_DEFECT:
                raise GridError(
                    f"{self.band.value} grid spacing {self.grid.delta:g} cannot resolve "
                    f"a gaussian of sigma={self.sigma:g} (norm {norm:.6f})"
                )
            object.__setattr__(self, "_scale", 1.0 / math.sqrt(norm))
        else:
            if not self.grid.is_interior(self.center):
                raise GridError(
                    f"grid-delta center {self.center!r} must be an interior point of the "
                    f"{self.band.value} grid"
                )
            if not self.bin_width > 0:
                object.__setattr__(self, "bin_width", self.grid.delta)

    def _check_gaussian(self):
        if not self.sigma > 0:
            raise InvalidParameterError(f"gaussian sigma must be > 0, got {self.sigma}")
        reach = TRUNCATION_WIDTHS * self.sigma
        if self.center - reach < self.grid.lower or self.center + reach > self.grid.upper:
            raise GridError(
                f"{self.band.value} grid [{self.grid.lower}, {self.grid.upper}] must extend "
                f"{TRUNCATION_WIDTHS:g} sigma around the waveform center {self.center}"
            )

    def _gaussian(self, k: np.ndarray) -> np.ndarray:
        return (2.0 * np.pi * self.sigma ** 2) ** -0.25 * np.exp(
            -((k - self.center) ** 2) / (4.0 * self.sigma ** 2)
        )

    @classmethod
    def gaussian(cls, band: Band, center: float, sigma: float, grid: Grid1D) -> "Waveform":
        return cls(band=band, center=center, shape=ShapeKind.GAUSSIAN, grid=grid, sigma=sigma)

    @classmethod
    def grid_delta(cls, band: Band, center: float, grid: Grid1D) -> "Waveform":
        return cls(band=band, center=center, shape=ShapeKind.GRID_DELTA, grid=grid)

    def on_grid(self, grid: Grid1D) -> "Waveform":
        """Same field carried over to another grid of the same band."""
        return dataclasses.replace(self, grid=grid)

    def evaluate(self, k: ArrayLike) -> ArrayLike:
        """phi(k) (real-valued shapes, returned as complex)."""
        kk = np.asarray(k, dtype=float)
        if self.shape is ShapeKind.GAUSSIAN:
            value = self._scale * self._gaussian(kk)
        else:
            on_bin = np.abs(kk - self.center) <= ON_GRID_RTOL * self.bin_width
            value = np.where(on_bin, 1.0 / math.sqrt(self.bin_width), 0.0)
        value = value.astype(complex)
        return value if value.ndim else complex(value)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Quadrature footprint of the waveform.

        Returns:
            (k nodes, quadrature weight * phi at the nodes)
        """
        if self.shape is ShapeKind.GRID_DELTA:
            return np.array([self.center]), np.array([math.sqrt(self.bin_width)], dtype=complex)
        k = self.grid.points
        weighted = self.grid.weights * self.evaluate(k)
        keep = np.abs(weighted) >= SUPPORT_CUTOFF * np.max(np.abs(weighted))
        return k[keep], weighted[keep]

    @property
    def norm(self) -> float:
        """Grid quadrature of |phi|^2."""
        if self.shape is ShapeKind.GRID_DELTA:
            return self.bin_width * (1.0 / math.sqrt(self.bin_width)) ** 2
        return float(np.dot(self.grid.weights, np.abs(self.evaluate(self.grid.points)) ** 2))

    @property
    def occupancy(self) -> float:
        """|integral of phi dk|^2: the spectral bandwidth the field occupies."""
        _, weighted = self.support()
        return float(abs(weighted.sum()) ** 2)

    @property
    def width(self) -> float:
        """sigma for a gaussian, the bin width for a grid-delta."""
        return self.sigma if self.shape is ShapeKind.GAUSSIAN else self.bin_width


@dataclass(frozen=True)
class CoherentInput:
    """Coherent state with waveform phi and amplitude z."""
    waveform: Waveform
    z: complex

    @property
    def band(self) -> Band:
        return self.waveform.band

    @property
    def mean_photon_number(self) -> float:
        return abs(self.z) ** 2

    def on_grid(self, grid: Grid1D) -> "CoherentInput":
        return CoherentInput(self.waveform.on_grid(grid), self.z)


# ---------------------------------------------------------------------------
# Waveguide
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveguideModel:
    """Full physical configuration shared by every process."""
    dispersion: DispersionRelation
    loss: LossProfile
    coupling: CouplingModel
    window: InteractionWindow
    grids: SpectralGrids
    units: UnitMode = UnitMode.NONDIMENSIONAL

    def __post_init__(self):
        scale = self.coupling.feature_scale
        if math.isfinite(scale):
            lowest = 2 * self.grids.f.lower - self.grids.sh.upper
            highest = 2 * self.grids.f.upper - self.grids.sh.lower
            reach = TRUNCATION_WIDTHS * scale
            if self.coupling.offset - reach < lowest or self.coupling.offset + reach > highest:
                raise GridError(
                    f"grids reach phase mismatch [{lowest:g}, {highest:g}] but the envelope needs "
                    f"{self.coupling.offset:g} +/- {reach:g}"
                )

    @property
    def hbar(self) -> float:
        return constants.hbar if self.units is UnitMode.SI else 1.0

    def refined(self, factor: int) -> "WaveguideModel":
        return dataclasses.replace(self, grids=self.grids.refined(factor))

    def narrowest_feature(self) -> float:
        """
        Smallest k-scale among the envelope, the loss tables and the
        phase the interaction window imprints (pi / (v T)).
        """
        fastest = max(self.dispersion.f.v, self.dispersion.sh.v)
        return min(
            self.coupling.feature_scale,
            self.loss.f.feature_scale,
            self.loss.sh.feature_scale,
            np.pi / (fastest * self.window.half_width),
        )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def eval_dispersion(model: WaveguideModel, band: Band, k: ArrayLike) -> ArrayLike:
    """omega_mk = omega_m0 + v_m (k - k_m0)."""
    return model.dispersion.for_band(band).omega(k)


def eval_loss(model: WaveguideModel, band: Band, k: ArrayLike) -> ArrayLike:
    """Loss rate beta_mk >= 0."""
    return model.loss.for_band(band).evaluate(k)


def alpha_from_beta(beta: float, v: float) -> float:
    """
    Spatial attenuation coefficient alpha = 2 beta / v.

    Raises:
        InvalidParameterError: v <= 0 or beta < 0
    """
    if not v > 0:
        raise InvalidParameterError(f"group velocity must be > 0, got {v}")
    if not beta >= 0:
        raise InvalidParameterError(f"loss rate must be >= 0, got {beta}")
    return 2.0 * beta / v


def eval_coupling(model: WaveguideModel, k1: ArrayLike, k2: ArrayLike, k: ArrayLike) -> ArrayLike:
    """S(k1, k2, k); exactly symmetric in (k1, k2)."""
    return model.coupling.evaluate(k1, k2, k)
