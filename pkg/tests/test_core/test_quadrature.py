import math

import numpy as np
import pytest

from setsim.core.errors import ConvergenceError, GridError, InvalidParameterError, NumericalDomainError
from setsim.core.model import InteractionWindow
from setsim.core.quadrature import (
    Grid1D,
    QuadratureConfig,
    gauss_legendre,
    integrate_1d,
    integrate_t_window,
)


class TestGrid1D:
    """Test uniform grid construction and lookup."""

    def test_delta_and_points(self):
        grid = Grid1D(-1.0, 1.0, 5)
        assert grid.delta == 0.5
        assert np.array_equal(grid.points, [-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_trapezoid_weights_sum_to_span(self):
        grid = Grid1D(-3.0, 5.0, 17)
        assert grid.weights.sum() == pytest.approx(8.0, rel=1e-15)
        assert grid.weights[0] == grid.weights[-1] == 0.5 * grid.delta

    def test_too_few_points(self):
        with pytest.raises(GridError):
            Grid1D(0.0, 1.0, 1)

    def test_reversed_bounds(self):
        with pytest.raises(GridError):
            Grid1D(1.0, 0.0, 5)

    def test_index_of(self):
        grid = Grid1D(-10.0, 10.0, 81)
        assert grid.index_of(-2.0) == 32
        assert grid.index_of(10.0) == 80

    def test_index_of_off_grid(self):
        with pytest.raises(GridError):
            Grid1D(-1.0, 1.0, 5).index_of(0.1)

    def test_index_of_outside(self):
        with pytest.raises(GridError):
            Grid1D(-1.0, 1.0, 5).index_of(1.5)

    def test_is_interior(self):
        grid = Grid1D(-1.0, 1.0, 5)
        assert grid.is_interior(0.0)
        assert not grid.is_interior(-1.0)
        assert not grid.is_interior(0.3)

    def test_refined_keeps_points(self):
        grid = Grid1D(-1.0, 1.0, 9)
        fine = grid.refined(4)
        assert fine.n == 33
        assert np.allclose(fine.points[::4], grid.points, rtol=0, atol=1e-15)


class TestQuadratureConfig:
    def test_defaults(self):
        config = QuadratureConfig()
        assert config.tolerance == 1e-4
        assert config.max_doublings == 6
        assert config.base_nodes == 64

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(InvalidParameterError):
            QuadratureConfig(tolerance=0.0)

    def test_rejects_negative_doublings(self):
        with pytest.raises(InvalidParameterError):
            QuadratureConfig(max_doublings=-1)


class TestIntegrate1D:
    """Test trapezoid integration on uniform grids."""

    def test_zero(self):
        assert integrate_1d(lambda x: np.zeros_like(x), Grid1D(0.0, 1.0, 7)) == 0

    @pytest.mark.parametrize("n", [2, 3, 10, 101])
    def test_constant_exact(self, n):
        assert integrate_1d(lambda x: np.ones_like(x), Grid1D(0.0, 1.0, n)) == pytest.approx(1.0, rel=1e-14)

    def test_linear_exact(self):
        value = integrate_1d(lambda x: 3.0 * x + 1.0, Grid1D(-1.0, 2.0, 4))
        assert value == pytest.approx(7.5, rel=1e-14)

    def test_exponential_refined(self):
        value = integrate_1d(np.exp, Grid1D(-1.0, 1.0, 2001))
        assert value.real == pytest.approx(2.0 * math.sinh(1.0), rel=1e-6)

    def test_non_finite_sample(self):
        grid = Grid1D(-1.0, 1.0, 5)
        with pytest.raises(NumericalDomainError) as info:
            integrate_1d(lambda x: np.where(x == 0.0, np.nan, 1.0), grid)
        assert info.value.abscissa == 0.0


class TestGaussLegendre:
    """Test the time rule and its doubling loop."""

    def setup_method(self):
        self.window = InteractionWindow.from_half_width(1.0)

    @pytest.mark.parametrize("degree", range(8))
    def test_four_nodes_exact_to_degree_seven(self, degree):
        nodes, weights = gauss_legendre(4, -1.0, 1.0)
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert np.dot(weights, nodes ** degree) == pytest.approx(exact, abs=1e-14)

    def test_exponential(self):
        result = integrate_t_window(lambda t: np.exp(t), self.window)
        assert result.value.real == pytest.approx(2.0 * math.sinh(1.0), rel=1e-12)

    def test_full_oscillation(self):
        result = integrate_t_window(lambda t: np.exp(1j * np.pi * t), self.window)
        assert abs(result.value) < 1e-10

    def test_constant_at_first_comparison(self):
        result = integrate_t_window(lambda t: np.full(t.shape, 2.5 + 0j), self.window)
        assert result.value == pytest.approx(5.0, rel=1e-14)
        assert result.nodes == 128
        assert result.doublings == 1

    def test_vector_integrand_keeps_shape(self):
        result = integrate_t_window(lambda t: np.stack([np.ones_like(t), t, t ** 2], axis=1), self.window)
        assert result.value.shape == (3,)
        assert np.allclose(result.value, [2.0, 0.0, 2.0 / 3.0], atol=1e-14)

    def test_achieved_tolerance_within_request(self):
        config = QuadratureConfig(tolerance=1e-8)
        result = integrate_t_window(lambda t: np.exp(1j * 20.0 * t - t), self.window, config)
        assert result.achieved_tolerance <= 1e-8

    def test_convergence_failure_carries_estimate(self):
        config = QuadratureConfig(tolerance=1e-12, max_doublings=0, base_nodes=4)
        with pytest.raises(ConvergenceError) as info:
            integrate_t_window(lambda t: np.exp(1j * 200.0 * t), self.window, config)
        assert info.value.best_estimate is not None
        assert info.value.achieved_tolerance > 1e-12

    def test_small_bin_converges_on_its_own_scale(self):
        config = QuadratureConfig(tolerance=1e-4, max_doublings=0, base_nodes=4)

        def f(t):
            return np.stack([np.ones_like(t), 1e-6 * np.cos(50.0 * t)], axis=1)

        with pytest.raises(ConvergenceError):
            integrate_t_window(f, self.window, config)

    def test_bins_below_tail_floor_do_not_block(self):
        config = QuadratureConfig(tolerance=1e-4, max_doublings=0, base_nodes=4)

        def f(t):
            return np.stack([np.ones_like(t), 1e-20 * np.cos(50.0 * t)], axis=1)

        result = integrate_t_window(f, self.window, config)
        assert result.value[0] == pytest.approx(2.0, rel=1e-14)

    def test_non_finite_integrand(self):
        with pytest.raises(NumericalDomainError):
            integrate_t_window(lambda t: np.full(t.shape, np.inf), self.window)
