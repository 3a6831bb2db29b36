"""
Oracle Module
Independent checks of the engine.

Two kinds of reference:
- truncated Fock-space expectation values for coherent and two-photon states
  on at most three discrete modes, with no quadrature involved;
- the same scenario recomputed at higher resolution in k and t.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy.special import factorial

from ..config import get_settings
from .errors import InvalidInputError, InvalidParameterError, ResourceLimitError, TruncationError
from .logging_config import get_logger
from .model import Band
from .observables import BiphotonAmplitude, NumberDensityReport, SpectralAmplitude, pair_density, photon_density
from .quadrature import Grid1D, QuadratureConfig
from .scenario import Scenario, compute_densities

# Logger for this module
logger = get_logger(__name__)

MAX_MODES = 3
MAX_COHERENT_CUTOFF = 20
MAX_TWO_PHOTON_CUTOFF = 4

# Smallest norm a truncated coherent state may keep
MIN_TRUNCATED_NORM = 1.0 - 1e-8

# Relative asymmetry tolerated in two-photon coefficients
SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class DiscreteModeSystem:
    """
    Few-mode state on a truncated Fock basis.

    Either a product of coherent states (one z per mode) or the two-photon
    ket (1/sqrt(2)) sum_ij G_ij a_i^dag a_j^dag |vac>.
    """
    cutoff: int                                    # highest photon number per mode
    coherent: tuple[complex, ...] = ()
    pairs: tuple[tuple[complex, ...], ...] = ()

    def __post_init__(self):
        if bool(self.coherent) == bool(self.pairs):
            raise InvalidInputError("give either coherent amplitudes or two-photon coefficients")
        if not 1 <= self.modes <= MAX_MODES:
            raise InvalidInputError(f"mode count must be 1..{MAX_MODES}, got {self.modes}")
        if self.pairs:
            if any(len(row) != self.modes for row in self.pairs):
                raise InvalidInputError("two-photon coefficients must form a square matrix")
            if not 2 <= self.cutoff <= MAX_TWO_PHOTON_CUTOFF:
                raise InvalidInputError(f"two-photon cutoff must be 2..{MAX_TWO_PHOTON_CUTOFF}, got {self.cutoff}")
        elif not 1 <= self.cutoff <= MAX_COHERENT_CUTOFF:
            raise InvalidInputError(f"coherent cutoff must be 1..{MAX_COHERENT_CUTOFF}, got {self.cutoff}")

    @classmethod
    def coherent_state(cls, z: Sequence[complex], cutoff: int = MAX_COHERENT_CUTOFF) -> "DiscreteModeSystem":
        return cls(cutoff=cutoff, coherent=tuple(complex(v) for v in z))

    @classmethod
    def two_photon(cls, coefficients, cutoff: int = 2) -> "DiscreteModeSystem":
        matrix = np.asarray(coefficients, dtype=complex)
        return cls(cutoff=cutoff, pairs=tuple(tuple(complex(v) for v in row) for row in matrix))

    @property
    def modes(self) -> int:
        return len(self.coherent) or len(self.pairs)

    @property
    def dimension(self) -> int:
        return self.cutoff + 1


# ---------------------------------------------------------------------------
# Operator algebra
# ---------------------------------------------------------------------------

def _annihilation(dimension: int) -> np.ndarray:
    """a on the truncated basis: a|n> = sqrt(n) |n-1>."""
    return np.diag(np.sqrt(np.arange(1, dimension, dtype=float)), k=1)


def _apply(operator: np.ndarray, state: np.ndarray, mode: int) -> np.ndarray:
    """Single-mode operator acting on one axis of a product-basis tensor."""
    return np.moveaxis(np.tensordot(operator, state, axes=(1, mode)), 0, mode)


def _coherent_state(system: DiscreteModeSystem) -> np.ndarray:
    n = np.arange(system.dimension)
    factors = [
        np.exp(-abs(z) ** 2 / 2.0) * z ** n / np.sqrt(factorial(n))
        for z in system.coherent
    ]
    state = reduce(np.multiply.outer, factors)
    norm = float(np.sum(np.abs(state) ** 2))
    if norm < MIN_TRUNCATED_NORM:
        raise TruncationError(
            f"cutoff {system.cutoff} keeps only {norm:.10f} of the coherent-state norm"
        )
    return state


def _two_photon_state(system: DiscreteModeSystem) -> np.ndarray:
    coefficients = np.asarray(system.pairs, dtype=complex)
    scale = max(float(np.max(np.abs(coefficients))), np.finfo(float).tiny)
    if np.max(np.abs(coefficients - coefficients.T)) > SYMMETRY_RTOL * scale:
        raise InvalidInputError("two-photon coefficients must be symmetric")

    creation = _annihilation(system.dimension).T
    vacuum = np.zeros((system.dimension,) * system.modes, dtype=complex)
    vacuum[(0,) * system.modes] = 1.0
    state = np.zeros_like(vacuum)
    for i in range(system.modes):
        for j in range(system.modes):
            if coefficients[i, j] != 0:
                state = state + coefficients[i, j] * _apply(creation, _apply(creation, vacuum, j), i)
    return state / np.sqrt(2.0)


def _check_mode(system: DiscreteModeSystem, mode: int) -> None:
    if not 0 <= mode < system.modes:
        raise InvalidParameterError(f"mode index must be in 0..{system.modes - 1}, got {mode}")


def coherent_number_expectation(system: DiscreteModeSystem, mode: int) -> float:
    """
    <a_m^dag a_m> by explicit operator application.

    Raises:
        TruncationError: the cutoff loses more than 1e-8 of the norm
    """
    if not system.coherent:
        raise InvalidInputError("system holds no coherent state")
    _check_mode(system, mode)
    state = _coherent_state(system)
    lowered = _apply(_annihilation(system.dimension), state, mode)
    return float(np.vdot(lowered, lowered).real)


def pair_number_expectation(system: DiscreteModeSystem, mode_i: int, mode_j: int) -> float:
    """
    <a_i^dag a_j^dag a_j a_i> on the two-photon ket.

    i == j is allowed and gives the same-mode pair number.

    Raises:
        InvalidInputError: coefficients are not symmetric
    """
    if not system.pairs:
        raise InvalidInputError("system holds no two-photon state")
    _check_mode(system, mode_i)
    _check_mode(system, mode_j)
    state = _two_photon_state(system)
    a = _annihilation(system.dimension)
    lowered = _apply(a, _apply(a, state, mode_i), mode_j)
    return float(np.vdot(lowered, lowered).real)


# ---------------------------------------------------------------------------
# Check table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleCheck:
    """One row of the pass/fail table."""
    name: str
    expected: float
    actual: float
    tolerance: float   # relative; absolute when expected is 0

    @property
    def error(self) -> float:
        difference = abs(self.actual - self.expected)
        return difference / abs(self.expected) if self.expected != 0 else difference

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance


def _engine_pair_density(coefficient: complex) -> float:
    # 3-point grid; G is nonzero only between the two outer points
    grid = Grid1D(-1.0, 1.0, 3)
    amplitude = np.zeros((3, 3), dtype=complex)
    amplitude[0, 2] = amplitude[2, 0] = coefficient
    return pair_density(BiphotonAmplitude(grid, amplitude), -1.0, 1.0)


def _engine_photon_number(amplitude: complex) -> float:
    grid = Grid1D(-1.0, 1.0, 5)
    values = np.zeros(5, dtype=complex)
    values[2] = amplitude
    return photon_density(SpectralAmplitude(Band.F, grid, values), 0.0) * grid.delta


def run_fock_checks() -> list[OracleCheck]:
    """Fixed Fock-space checks that pin the density conventions."""
    c = 0.3 + 0.4j
    bin_amplitude = 0.7 - 0.2j
    bin_width = Grid1D(-1.0, 1.0, 5).delta
    z_bin = bin_amplitude * np.sqrt(bin_width)
    three_mode = [[0.0, 0.2, 0.1j], [0.2, 0.0, -0.3], [0.1j, -0.3, 0.05]]

    checks = [
        OracleCheck("coherent_vacuum", 0.0,
                    coherent_number_expectation(DiscreteModeSystem.coherent_state([0.0]), 0), 1e-12),
        OracleCheck("coherent_quarter", 0.25,
                    coherent_number_expectation(DiscreteModeSystem.coherent_state([0.5]), 0), 1e-10),
        OracleCheck("coherent_unit", 1.0,
                    coherent_number_expectation(DiscreteModeSystem.coherent_state([1j]), 0), 1e-10),
        OracleCheck("coherent_independent_modes", 0.25,
                    coherent_number_expectation(DiscreteModeSystem.coherent_state([0.5, 0.9j]), 0), 1e-10),
        OracleCheck("coherent_photon_density",
                    coherent_number_expectation(DiscreteModeSystem.coherent_state([z_bin]), 0),
                    _engine_photon_number(bin_amplitude), 1e-10),
        OracleCheck("pair_two_mode", 2.0 * abs(c) ** 2,
                    pair_number_expectation(DiscreteModeSystem.two_photon([[0.0, c], [c, 0.0]]), 0, 1), 1e-12),
        OracleCheck("pair_density_convention",
                    pair_number_expectation(DiscreteModeSystem.two_photon([[0.0, c], [c, 0.0]]), 0, 1),
                    _engine_pair_density(c), 1e-12),
        OracleCheck("pair_diagonal", 2.0 * abs(c) ** 2,
                    pair_number_expectation(DiscreteModeSystem.two_photon([[c, 0.0], [0.0, 0.0]]), 0, 0), 1e-12),
        OracleCheck("pair_three_mode", 2.0 * 0.3 ** 2,
                    pair_number_expectation(DiscreteModeSystem.two_photon(three_mode), 1, 2), 1e-12),
    ]
    for check in checks:
        logger.debug("%s: expected %.12g, got %.12g", check.name, check.expected, check.actual)
    return checks


# ---------------------------------------------------------------------------
# High-resolution recompute
# ---------------------------------------------------------------------------

def oracle_recompute(scenario: Scenario, factor: Optional[int] = None) -> NumberDensityReport:
    """
    Recompute every density with k spacing and base t nodes scaled by factor.

    Args:
        scenario: Scenario to recompute
        factor: Refinement factor (default: Settings.oracle_refinement)

    Returns:
        NumberDensityReport of the refined scenario

    Raises:
        ResourceLimitError: a refined grid exceeds Settings.oracle_max_cells
    """
    settings = get_settings()
    factor = factor or settings.oracle_refinement
    refined = scenario.refined(factor)
    n_f = refined.model.grids.f.n
    n_sh = refined.model.grids.sh.n
    cells = max(n_f * n_f if scenario.spdc is not None else n_f, n_sh)
    if cells > settings.oracle_max_cells:
        raise ResourceLimitError(
            f"{factor}x refinement needs {cells} cells, limit is {settings.oracle_max_cells}"
        )

    base = scenario.quadrature
    config = QuadratureConfig(
        tolerance=base.tolerance,
        max_doublings=base.max_doublings,
        base_nodes=base.base_nodes * factor,
    )
    logger.info("Oracle recompute of '%s' at %dx (%d cells)", scenario.name, factor, cells)
    return compute_densities(refined, config)


def compare_with_oracle(
    scenario: Scenario, tolerance: float, factor: Optional[int] = None
) -> list[OracleCheck]:
    """Scenario densities against their high-resolution recompute."""
    engine = compute_densities(scenario)
    reference = oracle_recompute(scenario, factor)
    engine_values = engine.densities()
    return [
        OracleCheck(f"{scenario.name}:{name}", value, engine_values[name], tolerance)
        for name, value in reference.densities().items()
    ]
