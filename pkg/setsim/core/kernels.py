"""
Kernels Module
Time-dependent spectral kernels of DFG, SFG and SPDC.

Every kernel has a batched form (``*_grid``) evaluating a block of times
against a set of wavenumbers, and a pointwise form that is the single-point
case of the batched one. Argument slots of S follow the generated-state
formulas literally: for DFG the generated wavenumber sits in the first slot,
for SFG and SPDC the SH wavenumber is the third.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import InvalidParameterError, InvalidProcessError
from .logging_config import get_logger
from .model import (
    ArrayLike,
    Band,
    CoherentInput,
    CouplingModel,
    EnvelopeKind,
    SpectralGrids,
    WaveguideModel,
    eval_coupling,
    eval_dispersion,
    eval_loss,
)

# Logger for this module
logger = get_logger(__name__)

# Envelope-tensor cells contracted per block of output wavenumbers
BLOCK_CELLS = 2_000_000

# Slack allowed when checking t against the interaction window
WINDOW_SLACK = 1e-12


class Process(Enum):
    """Nonlinear process."""
    DFG = "dfg"    # SH pump + F seed -> F idler (classical)
    SFG = "sfg"    # two F inputs -> SH (classical)
    SPDC = "spdc"  # SH pump -> F photon pairs (quantum)


# Band of each input, in order
_COMPOSITION = {
    Process.DFG: (Band.F, Band.SH),
    Process.SFG: (Band.F, Band.F),
    Process.SPDC: (Band.SH,),
}


@dataclass(frozen=True)
class ProcessInputs:
    """Input fields of one process (DFG: seed, pump; SFG: signal, idler; SPDC: pump)."""
    process: Process
    inputs: tuple[CoherentInput, ...]

    def __post_init__(self):
        bands = tuple(field.band for field in self.inputs)
        expected = _COMPOSITION[self.process]
        if bands != expected:
            raise InvalidProcessError(
                f"{self.process.value} needs inputs in bands "
                f"{[b.value for b in expected]}, got {[b.value for b in bands]}"
            )

    @classmethod
    def dfg(cls, seed: CoherentInput, pump: CoherentInput) -> "ProcessInputs":
        return cls(Process.DFG, (seed, pump))

    @classmethod
    def sfg(cls, signal: CoherentInput, idler: CoherentInput) -> "ProcessInputs":
        return cls(Process.SFG, (signal, idler))

    @classmethod
    def spdc(cls, pump: CoherentInput) -> "ProcessInputs":
        return cls(Process.SPDC, (pump,))

    @property
    def seed(self) -> CoherentInput:
        self._expect(Process.DFG)
        return self.inputs[0]

    @property
    def pump(self) -> CoherentInput:
        if self.process is Process.DFG:
            return self.inputs[1]
        self._expect(Process.SPDC)
        return self.inputs[0]

    @property
    def signal(self) -> CoherentInput:
        self._expect(Process.SFG)
        return self.inputs[0]

    @property
    def idler(self) -> CoherentInput:
        self._expect(Process.SFG)
        return self.inputs[1]

    def on_grids(self, grids: SpectralGrids) -> "ProcessInputs":
        return ProcessInputs(
            self.process, tuple(field.on_grid(grids.for_band(field.band)) for field in self.inputs)
        )

    def _expect(self, process: Process) -> None:
        if self.process is not process:
            raise InvalidProcessError(f"{self.process.value} inputs have no such field")


@dataclass(frozen=True)
class KernelSample:
    """One kernel value; k2 is set for the two-argument SPDC kernel."""
    k: float
    t: float
    value: complex
    k2: Optional[float] = None


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _require(inputs: ProcessInputs, process: Process) -> None:
    if inputs.process is not process:
        raise InvalidProcessError(f"expected {process.value} inputs, got {inputs.process.value}")


def _times(model: WaveguideModel, t: ArrayLike) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    window = model.window
    slack = WINDOW_SLACK * window.duration
    if np.any(t < window.t0 - slack) or np.any(t > window.t1 + slack):
        raise InvalidParameterError(f"t must lie in [{window.t0}, {window.t1}]")
    return t


def _field_factor(
    model: WaveguideModel, field: CoherentInput, t: np.ndarray, sign: int, conjugate: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """
    Weighted waveform times its free phase and its loss since t0.

    Returns:
        (k nodes, array[t, node] of w phi exp(sign i omega t) exp(-beta (t - t0)))
    """
    k, weighted = field.waveform.support()
    if conjugate:
        weighted = np.conj(weighted)
    omega = eval_dispersion(model, field.band, k)
    beta = eval_loss(model, field.band, k)
    factor = (
        weighted[None, :]
        * np.exp(sign * 1j * np.outer(t, omega))
        * np.exp(-np.outer(t - model.window.t0, beta))
    )
    return k, factor


def _mix(
    coupling: CouplingModel,
    mismatch: Callable[[np.ndarray], np.ndarray],
    k_out: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
) -> np.ndarray:
    """
    sum over (k1, k2) of pm(mismatch) a[t, k1] b[t, k2] for every output k.

    ``mismatch(k_block)`` returns the (block, k1, k2) array of
    phase-matching arguments before the offset is removed.
    """
    if coupling.envelope is EnvelopeKind.CONSTANT:
        product = a.sum(axis=1) * b.sum(axis=1)
        return np.repeat(product[:, None], k_out.size, axis=1)

    mixed = np.empty((a.shape[0], k_out.size), dtype=complex)
    block = max(1, BLOCK_CELLS // max(1, a.shape[1] * b.shape[1]))
    for start in range(0, k_out.size, block):
        chunk = k_out[start:start + block]
        pm = coupling.phase_matching(mismatch(chunk) - coupling.offset)
        mixed[:, start:start + block] = np.einsum("kab,ta,tb->tk", pm, a, b, optimize=True)
    return mixed


def coupling_t(model: WaveguideModel, k1: ArrayLike, k2: ArrayLike, k: ArrayLike, t: ArrayLike) -> ArrayLike:
    """S(k1, k2, k; t) = S(k1, k2, k) exp(i (omega_F k1 + omega_F k2 - omega_SH k) t)."""
    detuning = (
        eval_dispersion(model, Band.F, k1)
        + eval_dispersion(model, Band.F, k2)
        - eval_dispersion(model, Band.SH, k)
    )
    return eval_coupling(model, k1, k2, k) * np.exp(1j * detuning * np.asarray(t, dtype=float))


# ---------------------------------------------------------------------------
# Batched kernels
# ---------------------------------------------------------------------------

def dfg_kernel_grid(model: WaveguideModel, inputs: ProcessInputs, k: ArrayLike, t: ArrayLike) -> np.ndarray:
    """
    Phi_DFG(k; t) for every (t, k).

    Returns:
        complex array of shape (len(t), len(k))
    """
    _require(inputs, Process.DFG)
    t = _times(model, t)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    seed, pump = inputs.seed, inputs.pump

    # seed enters conjugated; S(k, k1, k2; t) carries exp(i (w_k + w_k1 - w_k2) t)
    k1, a = _field_factor(model, seed, t, sign=+1, conjugate=True)
    k2, b = _field_factor(model, pump, t, sign=-1)
    mixed = _mix(
        model.coupling,
        lambda kb: kb[:, None, None] + k1[None, :, None] - k2[None, None, :],
        k, a, b,
    )
    prefactor = 2j * np.conj(seed.z) * pump.z * model.coupling.strength / model.hbar
    return prefactor * np.exp(1j * np.outer(t, eval_dispersion(model, Band.F, k))) * mixed


def sfg_kernel_grid(model: WaveguideModel, inputs: ProcessInputs, k: ArrayLike, t: ArrayLike) -> np.ndarray:
    """
    Phi_SFG(k; t) for every (t, k).

    Returns:
        complex array of shape (len(t), len(k))
    """
    _require(inputs, Process.SFG)
    t = _times(model, t)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    signal, idler = inputs.signal, inputs.idler

    # S*(k1, k2, k; t) carries exp(-i (w_k1 + w_k2 - w_k) t)
    k1, a = _field_factor(model, signal, t, sign=-1)
    k2, b = _field_factor(model, idler, t, sign=-1)
    mixed = _mix(
        model.coupling,
        lambda kb: k1[None, :, None] + k2[None, None, :] - kb[:, None, None],
        k, a, b,
    )
    prefactor = 2j * signal.z * idler.z * model.coupling.strength / model.hbar
    return prefactor * np.exp(1j * np.outer(t, eval_dispersion(model, Band.SH, k))) * mixed


def spdc_kernel_grid(
    model: WaveguideModel, inputs: ProcessInputs, k1: ArrayLike, k2: ArrayLike, t: ArrayLike
) -> np.ndarray:
    """
    phi(k1, k2; t) for every (t, k1, k2).

    The pump integral depends on (k1, k2) only through k1 + k2, so it is
    evaluated once per distinct sum.

    Returns:
        complex array of shape (len(t), len(k1), len(k2))
    """
    _require(inputs, Process.SPDC)
    t = _times(model, t)
    k1 = np.atleast_1d(np.asarray(k1, dtype=float))
    k2 = np.atleast_1d(np.asarray(k2, dtype=float))
    pump = inputs.pump

    kp, p = _field_factor(model, pump, t, sign=-1)
    sums = k1[:, None] + k2[None, :]
    distinct, inverse = np.unique(sums.ravel(), return_inverse=True)
    pm = model.coupling.phase_matching(distinct[:, None] - kp[None, :] - model.coupling.offset)
    collapsed = p @ np.atleast_2d(pm).T                      # (t, distinct sums)
    pair_phase = (
        eval_dispersion(model, Band.F, k1)[:, None] + eval_dispersion(model, Band.F, k2)[None, :]
    )
    prefactor = np.sqrt(2.0) * 1j * pump.z * model.coupling.strength / model.hbar
    return (
        prefactor
        * np.exp(1j * t[:, None, None] * pair_phase[None, :, :])
        * collapsed[:, inverse.reshape(sums.shape)]
    )


# ---------------------------------------------------------------------------
# Pointwise kernels
# ---------------------------------------------------------------------------

def dfg_kernel(model: WaveguideModel, inputs: ProcessInputs, k: float, t: float) -> complex:
    """Phi_DFG(k; t)."""
    return complex(dfg_kernel_grid(model, inputs, [k], [t])[0, 0])


def sfg_kernel(model: WaveguideModel, inputs: ProcessInputs, k: float, t: float) -> complex:
    """Phi_SFG(k; t)."""
    return complex(sfg_kernel_grid(model, inputs, [k], [t])[0, 0])


def spdc_kernel(model: WaveguideModel, inputs: ProcessInputs, k1: float, k2: float, t: float) -> complex:
    """phi(k1, k2; t)."""
    return complex(spdc_kernel_grid(model, inputs, [k1], [k2], [t])[0, 0, 0])


def kernel_sample(
    model: WaveguideModel, inputs: ProcessInputs, k: float, t: float, k2: Optional[float] = None
) -> KernelSample:
    """Evaluate the kernel of whichever process ``inputs`` describes."""
    if inputs.process is Process.DFG:
        value = dfg_kernel(model, inputs, k, t)
    elif inputs.process is Process.SFG:
        value = sfg_kernel(model, inputs, k, t)
    else:
        if k2 is None:
            raise InvalidParameterError("the SPDC kernel needs two wavenumbers")
        value = spdc_kernel(model, inputs, k, k2, t)
    return KernelSample(k=k, t=float(t), value=value, k2=k2)
