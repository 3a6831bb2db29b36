"""
Quadrature Module
Integration engine for every k- and t-integral: trapezoid rule on uniform
k grids, Gauss-Legendre on the interaction window with node doubling.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid

from .errors import ConvergenceError, GridError, InvalidParameterError, NumericalDomainError
from .logging_config import get_logger

# Logger for this module
logger = get_logger(__name__)

# Integrand evaluations per block of time nodes
NODE_CHUNK = 32

# Tolerance used to decide whether a value sits on a grid point
ON_GRID_RTOL = 1e-9

# Output bins below this share of the peak integral of |f| are measured against the floor
TAIL_FLOOR = 1e-12

Value = Union[complex, np.ndarray]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of n points over [lower, upper]."""
    lower: float
    upper: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise GridError(f"grid needs at least 2 points, got n={self.n}")
        if not np.isfinite(self.lower) or not np.isfinite(self.upper) or self.upper <= self.lower:
            raise GridError(f"grid bounds must satisfy upper > lower, got [{self.lower}, {self.upper}]")

    @property
    def delta(self) -> float:
        """Bin width (upper - lower) / (n - 1)."""
        return (self.upper - self.lower) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.n)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights: delta inside, delta/2 at both ends."""
        w = np.full(self.n, self.delta)
        w[0] = w[-1] = 0.5 * self.delta
        return w

    def index_of(self, k: float) -> int:
        """
        Index of the grid point equal to k.

        Raises:
            GridError: k is not a grid point
        """
        position = (k - self.lower) / self.delta
        index = int(round(position))
        if index < 0 or index >= self.n or abs(position - index) > ON_GRID_RTOL * max(1.0, abs(position)):
            raise GridError(f"k={k!r} is not a point of the grid [{self.lower}, {self.upper}] (n={self.n})")
        return index

    def is_interior(self, k: float) -> bool:
        """True when k is a grid point other than the two ends."""
        try:
            index = self.index_of(k)
        except GridError:
            return False
        return 0 < index < self.n - 1

    def refined(self, factor: int) -> "Grid1D":
        """Same span with the spacing divided by factor; keeps every old point."""
        if factor < 1:
            raise GridError(f"refinement factor must be >= 1, got {factor}")
        return Grid1D(self.lower, self.upper, factor * (self.n - 1) + 1)


@dataclass(frozen=True)
class QuadratureConfig:
    """Convergence control for the time integrals."""
    tolerance: float = 1e-4
    max_doublings: int = 6
    base_nodes: int = 64

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InvalidParameterError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_doublings < 0:
            raise InvalidParameterError(f"max_doublings must be >= 0, got {self.max_doublings}")
        if self.base_nodes < 1:
            raise InvalidParameterError(f"base_nodes must be >= 1, got {self.base_nodes}")


@dataclass(frozen=True)
class QuadratureResult:
    """Converged time integral plus the metadata of how it was reached."""
    value: Value
    nodes: int                 # Gauss-Legendre nodes of the returned estimate
    doublings: int             # times the node count was doubled
    achieved_tolerance: float  # last relative change, scaled by the integral of |f|


# ---------------------------------------------------------------------------
# k integrals
# ---------------------------------------------------------------------------

def integrate_1d(f: Callable[[np.ndarray], np.ndarray], grid: Grid1D) -> complex:
    """
    Trapezoid-rule approximation of the integral of f over the grid.

    Args:
        f: Vectorized complex function of the abscissa
        grid: Uniform grid

    Returns:
        Approximate integral

    Raises:
        NumericalDomainError: f is not finite at some grid point
    """
    x = grid.points
    samples = np.asarray(f(x), dtype=complex)
    bad = ~np.isfinite(samples)
    if bad.any():
        abscissa = float(x[np.argmax(bad)])
        raise NumericalDomainError(f"integrand is not finite at x={abscissa!r}", abscissa)
    return complex(trapezoid(samples, dx=grid.delta))


# ---------------------------------------------------------------------------
# t integrals
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _reference_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(n: int, t0: float, t1: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [t0, t1]."""
    x, w = _reference_rule(n)
    half = 0.5 * (t1 - t0)
    return half * x + 0.5 * (t1 + t0), half * w


def _apply_rule(f: Callable[[np.ndarray], np.ndarray], n: int, t0: float, t1: float) -> tuple[np.ndarray, np.ndarray]:
    """Integral of f and of |f| with the n-point rule, evaluated in node blocks."""
    nodes, weights = gauss_legendre(n, t0, t1)
    total = None
    magnitude = None
    for start in range(0, n, NODE_CHUNK):
        t = nodes[start:start + NODE_CHUNK]
        w = weights[start:start + NODE_CHUNK]
        samples = np.asarray(f(t), dtype=complex)
        bad = ~np.isfinite(samples)
        if bad.any():
            row = np.argwhere(bad)[0][0]
            raise NumericalDomainError(f"integrand is not finite at t={float(t[row])!r}", float(t[row]))
        block = np.tensordot(w, samples, axes=(0, 0))
        block_abs = np.tensordot(w, np.abs(samples), axes=(0, 0))
        total = block if total is None else total + block
        magnitude = block_abs if magnitude is None else magnitude + block_abs
    return np.asarray(total), np.asarray(magnitude)


def integrate_t_window(
    f: Callable[[np.ndarray], np.ndarray],
    window,
    config: Optional[QuadratureConfig] = None,
) -> QuadratureResult:
    """
    Gauss-Legendre integral of f over [t0, t1] with node doubling.

    f receives a 1-D array of times and returns an array whose first axis runs
    over those times; the result has the remaining shape (a scalar for scalar
    integrands). The base rule is always compared with its first doubling;
    ``max_doublings`` further doublings are allowed after that.

    Args:
        f: Vectorized integrand
        window: Object with ``t0`` and ``t1`` (an InteractionWindow)
        config: Convergence control (defaults to QuadratureConfig())

    Returns:
        QuadratureResult with the finest estimate

    Raises:
        ConvergenceError: tolerance not reached; carries the best estimate
    """
    config = config or QuadratureConfig()
    t0, t1 = window.t0, window.t1

    n = config.base_nodes
    previous, previous_magnitude = _apply_rule(f, n, t0, t1)
    change = float("inf")
    current = previous
    for doubling in range(1, config.max_doublings + 2):
        n *= 2
        current, magnitude = _apply_rule(f, n, t0, t1)
        change = _relative_change(current, previous, np.maximum(magnitude, previous_magnitude))
        logger.debug("t-rule %d nodes: relative change %.3e", n, change)
        if change <= config.tolerance:
            return QuadratureResult(_unwrap(current), n, doubling, change)
        previous, previous_magnitude = current, magnitude

    raise ConvergenceError(
        f"time integral did not converge to {config.tolerance:g} within "
        f"{config.max_doublings + 1} doublings (last change {change:.3e})",
        best_estimate=_unwrap(current),
        achieved_tolerance=change,
    )


def _relative_change(current: np.ndarray, previous: np.ndarray, scale: np.ndarray) -> float:
    """
    Largest change of any output bin, each against its own integral of |f|.

    Bins below TAIL_FLOOR of the largest integral are judged against that floor.
    """
    peak = float(np.max(scale)) if scale.size else 0.0
    if peak == 0.0:
        return 0.0
    floored = np.maximum(scale, TAIL_FLOOR * peak)
    return float(np.max(np.abs(current - previous) / floored))


def _unwrap(value: np.ndarray) -> Value:
    return complex(value) if value.ndim == 0 else value
