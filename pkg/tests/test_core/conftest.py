"""Small single-bin waveguides shared by the core tests."""
from dataclasses import dataclass

import pytest

from setsim.core.kernels import ProcessInputs
from setsim.core.model import (
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
    WaveguideModel,
    Waveform,
)
from setsim.core.quadrature import Grid1D


@dataclass
class SingleBinSetup:
    model: WaveguideModel
    dfg: ProcessInputs
    sfg: ProcessInputs
    spdc: ProcessInputs


def build_single_bin(
    beta_f=0.0,
    beta_sh=0.0,
    coupling=None,
    z_seed=1.0,
    z_pump=1.0,
    z_signal=1.0,
    z_idler=1.0,
    n=9,
):
    """
    v_F = v_SH = 1, omega_F0 = 1, omega_SH0 = 2, T = 1, grids [-1, 1].
    Seed and signal at -0.5, idler at +0.5, pumps at 0: every process is
    energy matched at the probe points.
    """
    grids = SpectralGrids(Grid1D(-1.0, 1.0, n), Grid1D(-1.0, 1.0, n))
    model = WaveguideModel(
        dispersion=DispersionRelation(BandDispersion(0.0, 1.0, 1.0), BandDispersion(0.0, 2.0, 1.0)),
        loss=LossProfile(ConstantLoss(beta_f), ConstantLoss(beta_sh)),
        coupling=coupling or CouplingModel(1.0, EnvelopeKind.CONSTANT),
        window=InteractionWindow.from_half_width(1.0),
        grids=grids,
    )

    def field(band, center, z):
        return CoherentInput(Waveform.grid_delta(band, center, grids.for_band(band)), z)

    pump = field(Band.SH, 0.0, z_pump)
    return SingleBinSetup(
        model=model,
        dfg=ProcessInputs.dfg(field(Band.F, -0.5, z_seed), pump),
        sfg=ProcessInputs.sfg(field(Band.F, -0.5, z_signal), field(Band.F, 0.5, z_idler)),
        spdc=ProcessInputs.spdc(pump),
    )


@pytest.fixture
def single_bin():
    """Lossless single-bin setup with unit amplitudes."""
    return build_single_bin()


@pytest.fixture
def lossy_single_bin():
    """beta_F = 0.5, beta_SH = 1."""
    return build_single_bin(beta_f=0.5, beta_sh=1.0)
