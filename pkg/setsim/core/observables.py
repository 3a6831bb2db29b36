"""
Observables Module
Generated spectra, biphoton amplitudes and photon-number densities.

Each observable integrates a kernel over the interaction window with the
decay factor exp(-beta_out (t1 - t)) of the output wavenumber.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateBinError
from .kernels import (
    Process,
    ProcessInputs,
    dfg_kernel_grid,
    sfg_kernel_grid,
    spdc_kernel_grid,
)
from .logging_config import get_logger
from .model import Band, WaveguideModel, eval_loss
from .quadrature import Grid1D, QuadratureConfig, integrate_t_window

# Logger for this module
logger = get_logger(__name__)


@dataclass(frozen=True)
class SpectralAmplitude:
    """Generated classical field A(k) on the grid of its band."""
    band: Band
    grid: Grid1D
    amplitude: np.ndarray = field(repr=False)
    nodes: int = 0                     # t-rule nodes of the converged integral
    achieved_tolerance: float = 0.0

    @property
    def k(self) -> np.ndarray:
        return self.grid.points

    @property
    def density(self) -> np.ndarray:
        """|A(k)|^2, photons per unit k."""
        return np.abs(self.amplitude) ** 2

    @property
    def total_photons(self) -> float:
        """N_tot = sum |A|^2 dk."""
        return float(self.density.sum() * self.grid.delta)


@dataclass(frozen=True)
class BiphotonAmplitude:
    """
    Two-photon kernel G(k1, k2) on the F grid, without the 1/sqrt(2) of
    the ket. Rows run over k1, columns over k2.
    """
    grid: Grid1D
    amplitude: np.ndarray = field(repr=False)
    nodes: int = 0
    achieved_tolerance: float = 0.0

    @property
    def pair_density(self) -> np.ndarray:
        """<n_k1 n_k2> density 2|G|^2 over every cell, the diagonal included."""
        return 2.0 * np.abs(self.amplitude) ** 2

    @property
    def total_pairs(self) -> float:
        """Norm of the two-photon ket: sum |G|^2 dk^2."""
        return float((np.abs(self.amplitude) ** 2).sum() * self.grid.delta ** 2)


@dataclass(frozen=True)
class NumberDensityReport:
    """Densities at the probe wavenumbers for the processes that were run."""
    processes: tuple[Process, ...]
    dfg_single: Optional[float] = None    # N^DFG_sing(k_i)
    sfg_single: Optional[float] = None    # N^SFG_sing(k_p)
    spdc_pair: Optional[float] = None     # N^SPDC_pair(k_s, k_i)
    nodes: int = 0                        # largest t-rule node count used
    achieved_tolerance: float = 0.0

    def densities(self) -> dict[str, float]:
        values = {
            "dfg_single": self.dfg_single,
            "sfg_single": self.sfg_single,
            "spdc_pair": self.spdc_pair,
        }
        return {name: value for name, value in values.items() if value is not None}


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def _output_decay(model: WaveguideModel, band: Band, k: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.exp(-np.outer(model.window.t1 - t, eval_loss(model, band, k)))


def dfg_spectrum(
    model: WaveguideModel, inputs: ProcessInputs, config: Optional[QuadratureConfig] = None
) -> SpectralAmplitude:
    """
    A(k) = integral over the window of Phi_DFG(k; t) exp(-beta_F(k) (t1 - t)).

    Args:
        model: Waveguide configuration
        inputs: DFG inputs (seed, pump)
        config: Time-quadrature control

    Returns:
        F-band SpectralAmplitude
    """
    grid = model.grids.f
    k = grid.points

    def integrand(t):
        return dfg_kernel_grid(model, inputs, k, t) * _output_decay(model, Band.F, k, t)

    result = integrate_t_window(integrand, model.window, config)
    logger.debug("DFG spectrum converged with %d nodes", result.nodes)
    return SpectralAmplitude(Band.F, grid, np.asarray(result.value), result.nodes, result.achieved_tolerance)


def sfg_spectrum(
    model: WaveguideModel, inputs: ProcessInputs, config: Optional[QuadratureConfig] = None
) -> SpectralAmplitude:
    """A(k) = integral of Phi_SFG(k; t) exp(-beta_SH(k) (t1 - t)); SH-band output."""
    grid = model.grids.sh
    k = grid.points

    def integrand(t):
        return sfg_kernel_grid(model, inputs, k, t) * _output_decay(model, Band.SH, k, t)

    result = integrate_t_window(integrand, model.window, config)
    logger.debug("SFG spectrum converged with %d nodes", result.nodes)
    return SpectralAmplitude(Band.SH, grid, np.asarray(result.value), result.nodes, result.achieved_tolerance)


def spdc_biphoton(
    model: WaveguideModel, inputs: ProcessInputs, config: Optional[QuadratureConfig] = None
) -> BiphotonAmplitude:
    """G(k1, k2) = integral of phi(k1, k2; t) exp(-(beta_F(k1) + beta_F(k2)) (t1 - t))."""
    grid = model.grids.f
    k = grid.points
    beta = eval_loss(model, Band.F, k)
    pair_beta = beta[:, None] + beta[None, :]

    def integrand(t):
        decay = np.exp(-(model.window.t1 - t)[:, None, None] * pair_beta[None, :, :])
        return spdc_kernel_grid(model, inputs, k, k, t) * decay

    result = integrate_t_window(integrand, model.window, config)
    logger.debug("SPDC biphoton converged with %d nodes", result.nodes)
    return BiphotonAmplitude(grid, np.asarray(result.value), result.nodes, result.achieved_tolerance)


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

def pair_density(biphoton: BiphotonAmplitude, ks: float, ki: float) -> float:
    """
    N^SPDC_pair(ks, ki) = 2 |G(ks, ki)|^2, pairs per unit k^2.

    Raises:
        DegenerateBinError: ks and ki fall in the same bin
        GridError: ks or ki is not a grid point
    """
    i = biphoton.grid.index_of(ks)
    j = biphoton.grid.index_of(ki)
    if i == j:
        raise DegenerateBinError(f"signal and idler share the bin at k={ks!r}")
    return 2.0 * float(abs(biphoton.amplitude[i, j]) ** 2)


def photon_density(spectrum: SpectralAmplitude, k: float) -> float:
    """|A(k)|^2 at a grid point, photons per unit k."""
    return float(abs(spectrum.amplitude[spectrum.grid.index_of(k)]) ** 2)
