"""
Ratios Module
Quantum-classical number ratios, the loss integral I[x], the closed-form
Delta(x) and the discrepancy sweep over F-band loss.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..config import get_settings
from .errors import InvalidParameterError, InvalidProcessError, UndefinedRatioError
from .kernels import Process, ProcessInputs, coupling_t
from .logging_config import get_logger
from .model import Band, CoherentInput, WaveguideModel, Waveform, eval_dispersion, eval_loss
from .observables import (
    dfg_spectrum,
    pair_density,
    photon_density,
    sfg_spectrum,
    spdc_biphoton,
)
from .quadrature import ON_GRID_RTOL, QuadratureConfig, integrate_t_window

# Logger for this module
logger = get_logger(__name__)

# |xT| below which Delta switches to its series
SERIES_THRESHOLD = 1e-8


@dataclass(frozen=True)
class RatioReport:
    """Computed ratio, its lossless prediction and the closed-form diagnostic."""
    process: Process
    ratio: float
    ideal: float
    closed_form: Optional[float]         # approximate expression from narrow-field analysis
    closed_form_approximate: bool        # group velocities differ
    delta_k_s: float
    delta_k_i: float
    delta_k_p: Optional[float]           # SFG only
    t_nodes: int
    achieved_tolerance: float
    warnings: tuple[str, ...] = ()

    @property
    def correction_factor(self) -> float:
        return self.ratio / self.ideal


@dataclass(frozen=True)
class DeltaCurve:
    """Delta-difference sweep over beta / beta_SH at fixed beta_SH T."""
    beta_sh: float
    half_width: float
    beta_over_beta_sh: np.ndarray = field(repr=False)
    delta_minus: np.ndarray = field(repr=False)
    delta_plus: np.ndarray = field(repr=False)
    scaled_abs_difference: np.ndarray = field(repr=False)
    attenuated_abs_difference: np.ndarray = field(repr=False)

    @property
    def beta_sh_t(self) -> float:
        return self.beta_sh * self.half_width


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def delta_pm(x, T: float):
    """
    Delta(x) = 4 sinh^2(x T) / x^2, continued by 4 T^2 (1 + (x T)^2 / 3) near 0.

    Accepts scalars or arrays. Values beyond the float range come back as inf.
    """
    if not T > 0:
        raise InvalidParameterError(f"T must be > 0, got {T}")
    x = np.asarray(x, dtype=float)
    u = x * T
    small = np.abs(u) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        value = np.where(
            small,
            4.0 * T ** 2 * (1.0 + u ** 2 / 3.0),
            4.0 * np.sinh(safe * T) ** 2 / safe ** 2,
        )
    return value if value.ndim else float(value)


def log_delta_pm(x, T: float):
    """log Delta(x), finite wherever Delta itself overflows."""
    if not T > 0:
        raise InvalidParameterError(f"T must be > 0, got {T}")
    x = np.asarray(x, dtype=float)
    u = np.abs(x * T)
    small = u < SERIES_THRESHOLD
    safe = np.where(small, 1.0, np.abs(x))
    safe_u = np.where(small, 1.0, u)
    # 4 sinh^2(u) = e^{2u} (1 - e^{-2u})^2
    large = 2.0 * safe_u + 2.0 * np.log1p(-np.exp(-2.0 * safe_u)) - 2.0 * np.log(safe)
    value = np.where(small, np.log(4.0 * T ** 2) + np.log1p(u ** 2 / 3.0), large)
    return value if value.ndim else float(value)


def figure2_curve(beta_sh: float, T: float, sweep: Sequence[float]) -> DeltaCurve:
    """
    beta_SH^2 |Delta(beta_F- - beta_SH) - Delta(beta_F+ - beta_SH)| with
    symmetric F losses beta, so beta_F- = 0 and beta_F+ = 2 beta.

    Args:
        beta_sh: SH loss rate at the pump
        T: Half-width of the interaction window
        sweep: beta / beta_SH values, all >= 0

    Returns:
        DeltaCurve, one entry per sweep value

    Raises:
        InvalidParameterError: negative inputs, or a scaled difference beyond the float range
    """
    ratio = np.asarray(sweep, dtype=float).ravel()
    if np.any(ratio < 0) or not np.all(np.isfinite(ratio)):
        raise InvalidParameterError("sweep values must be finite and >= 0")
    if not (beta_sh >= 0 and np.isfinite(beta_sh)):
        raise InvalidParameterError(f"beta_sh must be finite and >= 0, got {beta_sh}")

    beta = ratio * beta_sh
    x_minus = np.full_like(ratio, -beta_sh)
    x_plus = 2.0 * beta - beta_sh
    delta_minus = delta_pm(x_minus, T)
    delta_plus = delta_pm(x_plus, T)
    # Delta is even in x
    same = np.abs(x_minus) == np.abs(x_plus)

    with np.errstate(invalid="ignore", over="ignore"):
        scaled = np.where(same, 0.0, beta_sh ** 2 * np.abs(delta_minus - delta_plus))
    overflow = ~np.isfinite(scaled)
    if np.any(overflow):
        first = float(ratio[np.argmax(overflow)])
        raise InvalidParameterError(
            f"scaled difference exceeds the float range at beta/beta_SH = {first:g} "
            f"(beta_SH T = {beta_sh * T:g})"
        )

    # both generated numbers share the survival factor exp(-2 (beta_F+ + beta_SH) T)
    exponent = -2.0 * (2.0 * beta + beta_sh) * T
    survival = np.exp(exponent)
    attenuated = scaled * survival
    underflow = (scaled > 0) & (survival == 0.0)
    if np.any(underflow):
        log_minus = log_delta_pm(x_minus, T)
        log_plus = log_delta_pm(x_plus, T)
        upper = np.maximum(log_minus, log_plus)
        lower = np.minimum(log_minus, log_plus)
        with np.errstate(divide="ignore"):
            log_scaled = 2.0 * np.log(beta_sh) + upper + np.log(-np.expm1(lower - upper))
        attenuated = np.where(underflow, np.exp(log_scaled + exponent), attenuated)

    return DeltaCurve(
        beta_sh=beta_sh,
        half_width=T,
        beta_over_beta_sh=ratio,
        delta_minus=np.atleast_1d(delta_minus),
        delta_plus=np.atleast_1d(delta_plus),
        scaled_abs_difference=np.atleast_1d(scaled),
        attenuated_abs_difference=np.atleast_1d(attenuated),
    )


# ---------------------------------------------------------------------------
# Loss integral
# ---------------------------------------------------------------------------

def _time_overlap(
    model: WaveguideModel,
    pump: Waveform,
    ks: float,
    ki: float,
    x: float,
    config: Optional[QuadratureConfig],
) -> complex:
    """integral over t and k of phi_p(k) S(ks, ki, k; t) exp(x t)."""
    kp, weighted = pump.support()
    weighted = weighted * model.coupling.evaluate(ks, ki, kp)

    def integrand(t):
        detuning = (
            eval_dispersion(model, Band.F, ks)
            + eval_dispersion(model, Band.F, ki)
            - eval_dispersion(model, Band.SH, kp)
        )
        phase = np.exp(1j * np.outer(t, detuning))
        return (phase * weighted[None, :]).sum(axis=1) * np.exp(x * t)

    return complex(integrate_t_window(integrand, model.window, config).value)


def I_integral(
    model: WaveguideModel,
    pump: Waveform,
    ks: float,
    ki: float,
    x: float,
    config: Optional[QuadratureConfig] = None,
) -> float:
    """
    |integral_{-T}^{T} dt integral dk phi_p(k) S(ks, ki, k; t) e^{x t}|^2.

    Raises:
        InvalidProcessError: pump is not an SH waveform
    """
    if pump.band is not Band.SH:
        raise InvalidProcessError("the loss integral needs an SH pump waveform")
    return abs(_time_overlap(model, pump, ks, ki, x, config)) ** 2


def _point_overlap(model: WaveguideModel, ks: float, ki: float, kp: float, x: float,
                   config: Optional[QuadratureConfig]) -> complex:
    def integrand(t):
        return np.atleast_1d(coupling_t(model, ks, ki, kp, t)) * np.exp(x * t)

    return complex(integrate_t_window(integrand, model.window, config).value)


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------

def _check_center(field_input: CoherentInput, k: float, label: str) -> None:
    waveform = field_input.waveform
    if abs(waveform.center - k) > ON_GRID_RTOL * max(1.0, abs(k), waveform.grid.delta):
        raise InvalidProcessError(f"{label} must be centered at k={k!r}, got {waveform.center!r}")


def narrowness_warnings(model: WaveguideModel, fields: dict[str, CoherentInput]) -> list[str]:
    """One message per field wider than the narrowness rule allows."""
    factor = get_settings().narrowness_factor
    limit = model.narrowest_feature() / factor
    messages = []
    for label, field_input in fields.items():
        width = field_input.waveform.width
        if width > limit:
            messages.append(
                f"{label} width {width:g} exceeds 1/{factor:g} of the narrowest "
                f"model feature ({limit:g})"
            )
    for message in messages:
        logger.warning(message)
    return messages


def _velocities_differ(model: WaveguideModel) -> bool:
    return model.dispersion.f.v != model.dispersion.sh.v


def _velocity_warnings(model: WaveguideModel) -> list[str]:
    if _velocities_differ(model):
        message = "v_F differs from v_SH; the closed-form diagnostic is approximate"
        logger.warning(message)
        return [message]
    return []


def _pair_number(n_pair: float, delta_k_s: float, delta_k_i: float) -> None:
    floor = get_settings().pair_number_floor
    if n_pair * delta_k_s * delta_k_i < floor:
        raise UndefinedRatioError(
            f"SPDC pair number {n_pair * delta_k_s * delta_k_i:.3e} is below {floor:g}"
        )


def ratio_dfg(
    model: WaveguideModel,
    spdc_inputs: ProcessInputs,
    dfg_inputs: ProcessInputs,
    ks: float,
    ki: float,
    config: Optional[QuadratureConfig] = None,
) -> RatioReport:
    """
    R^DFG = N^DFG_sing(ki) / (N^SPDC_pair(ks, ki) dk_s), from full spectra.

    dk_s is the occupancy of the seed; the idler bin width cancels.

    Raises:
        InvalidProcessError: seed not at ks, or the processes use different pumps
        UndefinedRatioError: vanishing pair number or lossless prediction
    """
    if spdc_inputs.process is not Process.SPDC or dfg_inputs.process is not Process.DFG:
        raise InvalidProcessError("ratio_dfg needs SPDC and DFG inputs")
    seed, pump = dfg_inputs.seed, dfg_inputs.pump
    if pump != spdc_inputs.pump:
        raise InvalidProcessError("DFG and SPDC must share the same pump field")
    _check_center(seed, ks, "DFG seed")

    warnings = narrowness_warnings(model, {"DFG seed": seed}) + _velocity_warnings(model)

    spectrum = dfg_spectrum(model, dfg_inputs, config)
    biphoton = spdc_biphoton(model, spdc_inputs, config)
    n_single = photon_density(spectrum, ki)
    n_pair = pair_density(biphoton, ks, ki)

    delta_k_s = seed.waveform.occupancy
    delta_k_i = model.grids.f.delta
    _pair_number(n_pair, delta_k_s, delta_k_i)
    ideal = seed.mean_photon_number
    if ideal == 0.0:
        raise UndefinedRatioError("seed amplitude is zero; the lossless prediction vanishes")

    ratio = n_single / (n_pair * delta_k_s)

    kp = pump.waveform.center
    beta_s = eval_loss(model, Band.F, ks)
    beta_i = eval_loss(model, Band.F, ki)
    beta_p = eval_loss(model, Band.SH, kp)
    numerator = I_integral(model, pump.waveform, ks, ki, beta_i - beta_s - beta_p, config)
    denominator = I_integral(model, pump.waveform, ks, ki, beta_i + beta_s - beta_p, config)
    closed_form = ideal * numerator / denominator if denominator > 0 else None

    logger.info("R^DFG = %.6g (ideal %.6g)", ratio, ideal)
    return RatioReport(
        process=Process.DFG,
        ratio=ratio,
        ideal=ideal,
        closed_form=closed_form,
        closed_form_approximate=_velocities_differ(model),
        delta_k_s=delta_k_s,
        delta_k_i=delta_k_i,
        delta_k_p=None,
        t_nodes=max(spectrum.nodes, biphoton.nodes),
        achieved_tolerance=max(spectrum.achieved_tolerance, biphoton.achieved_tolerance),
        warnings=tuple(warnings),
    )


def ratio_sfg(
    model: WaveguideModel,
    spdc_inputs: ProcessInputs,
    sfg_inputs: ProcessInputs,
    ks: float,
    ki: float,
    kp: float,
    config: Optional[QuadratureConfig] = None,
) -> RatioReport:
    """
    R^SFG = N^SFG_sing(kp) dk_p / (N^SPDC_pair(ks, ki) dk_s dk_i), from full spectra.

    The bandwidths are the occupancies of the signal, idler and pump fields.

    Raises:
        InvalidProcessError: a field is not centered where the ratio is taken
        UndefinedRatioError: vanishing pair number or lossless prediction
    """
    if spdc_inputs.process is not Process.SPDC or sfg_inputs.process is not Process.SFG:
        raise InvalidProcessError("ratio_sfg needs SPDC and SFG inputs")
    signal, idler, pump = sfg_inputs.signal, sfg_inputs.idler, spdc_inputs.pump
    _check_center(signal, ks, "SFG signal")
    _check_center(idler, ki, "SFG idler")
    _check_center(pump, kp, "SPDC pump")

    warnings = narrowness_warnings(
        model, {"SFG signal": signal, "SFG idler": idler, "SPDC pump": pump}
    ) + _velocity_warnings(model)

    spectrum = sfg_spectrum(model, sfg_inputs, config)
    biphoton = spdc_biphoton(model, spdc_inputs, config)
    n_single = photon_density(spectrum, kp)
    n_pair = pair_density(biphoton, ks, ki)

    delta_k_s = signal.waveform.occupancy
    delta_k_i = idler.waveform.occupancy
    delta_k_p = pump.waveform.occupancy
    _pair_number(n_pair, delta_k_s, delta_k_i)
    ideal = signal.mean_photon_number * idler.mean_photon_number / pump.mean_photon_number
    if ideal == 0.0:
        raise UndefinedRatioError("signal or idler amplitude is zero; the lossless prediction vanishes")

    ratio = n_single * delta_k_p / (n_pair * delta_k_s * delta_k_i)

    x = eval_loss(model, Band.F, ks) + eval_loss(model, Band.F, ki) - eval_loss(model, Band.SH, kp)
    spread = I_integral(model, pump.waveform, ks, ki, x, config)
    point = abs(_point_overlap(model, ks, ki, kp, x, config)) ** 2
    closed_form = ideal * delta_k_p * point / spread if spread > 0 else None

    logger.info("R^SFG = %.6g (ideal %.6g)", ratio, ideal)
    return RatioReport(
        process=Process.SFG,
        ratio=ratio,
        ideal=ideal,
        closed_form=closed_form,
        closed_form_approximate=_velocities_differ(model),
        delta_k_s=delta_k_s,
        delta_k_i=delta_k_i,
        delta_k_p=delta_k_p,
        t_nodes=max(spectrum.nodes, biphoton.nodes),
        achieved_tolerance=max(spectrum.achieved_tolerance, biphoton.achieved_tolerance),
        warnings=tuple(warnings),
    )
