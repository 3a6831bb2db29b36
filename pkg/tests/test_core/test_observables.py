import math

import numpy as np
import pytest

from setsim.core.errors import DegenerateBinError, GridError
from setsim.core.kernels import Process
from setsim.core.model import Band
from setsim.core.observables import (
    NumberDensityReport,
    dfg_spectrum,
    pair_density,
    photon_density,
    sfg_spectrum,
    spdc_biphoton,
)

from .conftest import build_single_bin


class TestDfgSpectrum:
    """Test the generated idler field."""

    def test_phase_matched_lossless(self, single_bin):
        spectrum = dfg_spectrum(single_bin.model, single_bin.dfg)
        # |2 s0 dk 2T|^2 with dk = 0.25, T = 1
        assert photon_density(spectrum, 0.5) == pytest.approx(1.0, rel=1e-12)
        assert spectrum.band is Band.F
        assert spectrum.k.shape == spectrum.density.shape

    def test_phase_matched_lossy(self, lossy_single_bin):
        spectrum = dfg_spectrum(lossy_single_bin.model, lossy_single_bin.dfg)
        expected = (math.exp(-2.0) * math.sinh(1.0)) ** 2
        assert photon_density(spectrum, 0.5) == pytest.approx(expected, rel=1e-10)

    def test_loss_lowers_peak(self, single_bin, lossy_single_bin):
        lossless = photon_density(dfg_spectrum(single_bin.model, single_bin.dfg), 0.5)
        lossy = photon_density(dfg_spectrum(lossy_single_bin.model, lossy_single_bin.dfg), 0.5)
        assert lossy < lossless

    def test_zero_pump_gives_empty_spectrum(self):
        setup = build_single_bin(z_pump=0.0)
        spectrum = dfg_spectrum(setup.model, setup.dfg)
        assert spectrum.total_photons == 0.0

    def test_total_photons(self, single_bin):
        spectrum = dfg_spectrum(single_bin.model, single_bin.dfg)
        assert spectrum.total_photons == pytest.approx(spectrum.density.sum() * 0.25)
        assert np.all(spectrum.density >= 0)

    def test_off_grid_density(self, single_bin):
        spectrum = dfg_spectrum(single_bin.model, single_bin.dfg)
        with pytest.raises(GridError):
            photon_density(spectrum, 0.3)


class TestSfgSpectrum:
    def test_phase_matched_lossless(self, single_bin):
        spectrum = sfg_spectrum(single_bin.model, single_bin.sfg)
        assert spectrum.band is Band.SH
        assert photon_density(spectrum, 0.0) == pytest.approx(1.0, rel=1e-12)

    def test_equal_input_loss_is_flat_in_time(self, lossy_single_bin):
        # beta_F (t - t0) for both inputs plus beta_SH (t1 - t) sum to 2 at every t
        spectrum = sfg_spectrum(lossy_single_bin.model, lossy_single_bin.sfg)
        assert photon_density(spectrum, 0.0) == pytest.approx(math.exp(-4.0), rel=1e-10)

    def test_quadratic_in_amplitudes(self, single_bin):
        scaled = build_single_bin(z_signal=0.5, z_idler=0.5)
        base = photon_density(sfg_spectrum(single_bin.model, single_bin.sfg), 0.0)
        value = photon_density(sfg_spectrum(scaled.model, scaled.sfg), 0.0)
        assert value == pytest.approx(base / 16.0, rel=1e-12)


class TestSpdcBiphoton:
    """Test the two-photon amplitude and pair densities."""

    def test_exchange_symmetric(self, lossy_single_bin):
        biphoton = spdc_biphoton(lossy_single_bin.model, lossy_single_bin.spdc)
        assert np.allclose(biphoton.amplitude, biphoton.amplitude.T, rtol=1e-15, atol=0.0)

    def test_pair_density_lossless(self, single_bin):
        biphoton = spdc_biphoton(single_bin.model, single_bin.spdc)
        assert pair_density(biphoton, -0.5, 0.5) == pytest.approx(4.0, rel=1e-12)

    def test_pair_density_convention(self, single_bin):
        biphoton = spdc_biphoton(single_bin.model, single_bin.spdc)
        i = biphoton.grid.index_of(-0.5)
        j = biphoton.grid.index_of(0.5)
        assert biphoton.pair_density[i, j] == pair_density(biphoton, -0.5, 0.5)
        assert pair_density(biphoton, -0.5, 0.5) == pytest.approx(2.0 * abs(biphoton.amplitude[i, j]) ** 2)

    def test_total_pairs(self, single_bin):
        biphoton = spdc_biphoton(single_bin.model, single_bin.spdc)
        expected = (np.abs(biphoton.amplitude) ** 2).sum() * 0.25 ** 2
        assert biphoton.total_pairs == pytest.approx(expected)

    def test_degenerate_bin(self, single_bin):
        biphoton = spdc_biphoton(single_bin.model, single_bin.spdc)
        with pytest.raises(DegenerateBinError):
            pair_density(biphoton, 0.25, 0.25)

    def test_loss_lowers_pairs(self, single_bin, lossy_single_bin):
        lossless = pair_density(spdc_biphoton(single_bin.model, single_bin.spdc), -0.5, 0.5)
        lossy = pair_density(spdc_biphoton(lossy_single_bin.model, lossy_single_bin.spdc), -0.5, 0.5)
        assert 0.0 < lossy < lossless

    def test_zero_pump(self):
        setup = build_single_bin(z_pump=0.0)
        assert spdc_biphoton(setup.model, setup.spdc).total_pairs == 0.0


def test_number_density_report_skips_missing():
    report = NumberDensityReport(processes=(Process.DFG,), dfg_single=0.5)
    assert report.densities() == {"dfg_single": 0.5}
