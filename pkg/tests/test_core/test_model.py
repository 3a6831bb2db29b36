import math

import numpy as np
import pytest

from setsim.core.errors import GridError, InvalidParameterError
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
    TableLoss,
    UnitMode,
    WaveguideModel,
    Waveform,
    alpha_from_beta,
    eval_coupling,
    eval_dispersion,
    eval_loss,
)
from setsim.core.quadrature import Grid1D


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _make_model(coupling=None, loss=None, units=UnitMode.NONDIMENSIONAL, grids=None):
    return WaveguideModel(
        dispersion=DispersionRelation(BandDispersion(0.0, 1.0, 1.0), BandDispersion(0.0, 2.0, 1.5)),
        loss=loss or LossProfile(),
        coupling=coupling or CouplingModel(1.0, EnvelopeKind.CONSTANT),
        window=InteractionWindow.from_half_width(1.0),
        grids=grids or SpectralGrids(Grid1D(-10.0, 10.0, 81), Grid1D(-8.0, 8.0, 65)),
        units=units,
    )


class TestDispersion:
    """Test linear dispersion."""

    def test_center_frequency(self):
        model = _make_model()
        assert eval_dispersion(model, Band.F, 0.0) == 1.0
        assert eval_dispersion(model, Band.SH, 0.0) == 2.0

    def test_linear_in_k(self):
        model = _make_model()
        assert eval_dispersion(model, Band.SH, 2.0) == pytest.approx(5.0)

    def test_vectorized(self):
        values = eval_dispersion(_make_model(), Band.F, np.array([-1.0, 0.0, 1.0]))
        assert np.allclose(values, [0.0, 1.0, 2.0])

    def test_zero_velocity_rejected(self):
        with pytest.raises(InvalidParameterError):
            BandDispersion(0.0, 1.0, 0.0)


class TestLoss:
    """Test constant and tabulated loss profiles."""

    def test_lossless_default(self):
        model = _make_model()
        assert eval_loss(model, Band.F, 3.0) == 0.0

    def test_constant(self):
        model = _make_model(loss=LossProfile(ConstantLoss(0.5), ConstantLoss(1.0)))
        assert eval_loss(model, Band.F, -7.0) == 0.5
        assert np.array_equal(eval_loss(model, Band.SH, np.zeros(3)), [1.0, 1.0, 1.0])

    def test_negative_rejected(self):
        with pytest.raises(InvalidParameterError):
            ConstantLoss(-0.1)

    def test_table_interpolates_and_clamps(self):
        table = TableLoss((-1.0, 0.0, 1.0), (0.2, 0.4, 0.4))
        assert table.evaluate(-0.5) == pytest.approx(0.3)
        assert table.evaluate(-5.0) == pytest.approx(0.2)
        assert table.evaluate(5.0) == pytest.approx(0.4)

    def test_table_feature_scale_ignores_flat_spans(self):
        table = TableLoss((-10.0, -4.0, 0.0, 4.0, 10.0), (0.2, 0.2, 0.35, 0.5, 0.5))
        assert table.feature_scale == 4.0

    def test_table_requires_increasing_knots(self):
        with pytest.raises(InvalidParameterError):
            TableLoss((0.0, 0.0), (0.1, 0.1))


class TestAlphaFromBeta:
    def test_conversion(self):
        assert alpha_from_beta(0.5, 2.0) == 0.5

    def test_lossless(self):
        assert alpha_from_beta(0.0, 3.0) == 0.0

    def test_nonpositive_velocity(self):
        with pytest.raises(InvalidParameterError):
            alpha_from_beta(1.0, 0.0)

    def test_negative_beta(self):
        with pytest.raises(InvalidParameterError):
            alpha_from_beta(-1.0, 1.0)


class TestCoupling:
    """Test the phase-matching envelopes."""

    def test_constant_envelope(self):
        model = _make_model(CouplingModel(2.0, EnvelopeKind.CONSTANT))
        assert eval_coupling(model, 1.0, 3.0, -4.0) == 2.0

    def test_gaussian_peak_and_decay(self):
        model = _make_model(CouplingModel(1.0, EnvelopeKind.GAUSSIAN, width=2.0))
        assert eval_coupling(model, 1.0, 1.0, 2.0) == 1.0
        assert eval_coupling(model, 1.0, 1.0, 0.0) == pytest.approx(math.exp(-0.5))

    def test_sinc_zero(self):
        coupling = CouplingModel(1.0, EnvelopeKind.SINC, width=0.5)
        assert abs(coupling.phase_matching(2.0 * np.pi / 0.5)) < 1e-15

    def test_exchange_symmetric(self):
        model = _make_model(CouplingModel(1.0, EnvelopeKind.GAUSSIAN, width=1.5, offset=0.3))
        assert eval_coupling(model, 0.7, -1.9, 0.2) == eval_coupling(model, -1.9, 0.7, 0.2)

    @pytest.mark.parametrize("coupling", [
        CouplingModel(1.0, EnvelopeKind.CONSTANT),
        CouplingModel(1.0, EnvelopeKind.GAUSSIAN, width=1.5, offset=0.3),
        CouplingModel(0.8, EnvelopeKind.SINC, width=2.0, offset=-0.4),
    ])
    def test_exchange_symmetric_on_random_triples(self, coupling):
        model = _make_model(coupling)
        rng = np.random.default_rng(1729)
        k1, k2 = rng.uniform(-10.0, 10.0, size=(2, 1000))
        k = rng.uniform(-8.0, 8.0, size=1000)
        forward = eval_coupling(model, k1, k2, k)
        assert np.allclose(eval_coupling(model, k2, k1, k), forward, rtol=1e-12, atol=0.0)

    def test_zero_strength_allowed(self):
        assert CouplingModel(0.0).strength == 0.0

    def test_negative_strength_rejected(self):
        with pytest.raises(InvalidParameterError):
            CouplingModel(-1.0)

    def test_envelope_must_fit_grids(self):
        with pytest.raises(GridError):
            _make_model(CouplingModel(1.0, EnvelopeKind.GAUSSIAN, width=10.0))


class TestInteractionWindow:
    def test_half_width(self):
        window = InteractionWindow.from_half_width(2.0)
        assert (window.t0, window.t1, window.duration) == (-2.0, 2.0, 4.0)

    def test_from_length(self):
        window = InteractionWindow.from_length(0.01, 1.0e8)
        assert window.half_width == pytest.approx(5e-11)
        assert window.duration == pytest.approx(1e-10)

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidParameterError):
            InteractionWindow.from_half_width(0.0)


class TestWaveform:
    """Test gaussian and grid-delta waveforms."""

    def setup_method(self):
        self.grid = Grid1D(-10.0, 10.0, 81)

    def test_gaussian_normalized(self):
        waveform = Waveform.gaussian(Band.F, -2.0, 1.0, self.grid)
        assert waveform.norm == pytest.approx(1.0, rel=1e-12)

    def test_gaussian_occupancy(self):
        waveform = Waveform.gaussian(Band.F, 0.0, 1.0, self.grid)
        assert waveform.occupancy == pytest.approx(math.sqrt(8.0 * math.pi), rel=1e-6)

    def test_gaussian_truncated_grid(self):
        with pytest.raises(GridError):
            Waveform.gaussian(Band.F, 6.0, 1.0, self.grid)

    def test_gaussian_unresolved(self):
        with pytest.raises(GridError):
            Waveform.gaussian(Band.F, 0.0, 0.05, self.grid)

    def test_grid_delta_single_bin(self):
        waveform = Waveform.grid_delta(Band.F, 0.5, self.grid)
        values = waveform.evaluate(self.grid.points)
        assert np.count_nonzero(values) == 1
        assert waveform.norm == pytest.approx(1.0)
        assert waveform.occupancy == pytest.approx(self.grid.delta)

    def test_grid_delta_must_be_interior(self):
        with pytest.raises(GridError):
            Waveform.grid_delta(Band.F, 10.0, self.grid)
        with pytest.raises(GridError):
            Waveform.grid_delta(Band.F, 0.1, self.grid)

    def test_grid_delta_keeps_bin_width_on_refinement(self):
        waveform = Waveform.grid_delta(Band.F, 0.5, self.grid)
        moved = waveform.on_grid(self.grid.refined(4))
        assert moved.bin_width == self.grid.delta
        assert moved.occupancy == pytest.approx(waveform.occupancy)

    def test_coherent_mean_photon_number(self):
        field = CoherentInput(Waveform.grid_delta(Band.SH, 0.0, Grid1D(-1.0, 1.0, 5)), 0.6 + 0.8j)
        assert field.mean_photon_number == pytest.approx(1.0)
        assert field.band is Band.SH


class TestWaveguideModel:
    def test_hbar_by_units(self):
        assert _make_model().hbar == 1.0
        assert _make_model(units=UnitMode.SI).hbar == pytest.approx(1.054571817e-34)

    def test_refined_grids(self):
        model = _make_model().refined(2)
        assert model.grids.f.n == 161
        assert model.grids.sh.n == 129

    def test_narrowest_feature(self):
        model = _make_model(CouplingModel(1.0, EnvelopeKind.GAUSSIAN, width=0.5))
        assert model.narrowest_feature() == 0.5
        # constant coupling: the window phase pi / (v_max T) is left
        assert _make_model().narrowest_feature() == pytest.approx(math.pi / 1.5)
