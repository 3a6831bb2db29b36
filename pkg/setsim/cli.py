"""
CLI Module
Command-line front end: spectra, ratios, figure2, oracle-check, convergence.

Exit status: 0 success, 1 failure (including a failed oracle check),
2 configuration error, 3 convergence failure, 4 undefined ratio.
"""

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import get_settings
from .core.convergence import convergence_report
from .core.errors import ConfigError, ConvergenceError, SimulationError
from .core.kernels import Process
from .core.logging_config import get_logger, level_from_name, setup_logging
from .core.observables import dfg_spectrum, sfg_spectrum, spdc_biphoton
from .core.oracle import compare_with_oracle, run_fock_checks
from .core.ratios import figure2_curve, narrowness_warnings, ratio_dfg, ratio_sfg
from .schemas.common import ErrorDetail
from .schemas.reports import ProbePayload, RatioPayload, RatiosRunPayload
from .schemas.scenario import load_scenario
from .services.tables import (
    biphoton_frame,
    convergence_frame,
    figure2_frame,
    oracle_frame,
    spectrum_frame,
    write_csv,
    write_json,
)

# Logger for this module
logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1


def parse_sweep(text: str) -> np.ndarray:
    """
    'MIN:MAX:N' -> N evenly spaced values from MIN to MAX.

    Raises:
        ConfigError: malformed text, MIN < 0, MAX < MIN, N < 1, or N = 1 with MAX != MIN
    """
    parts = text.split(":")
    try:
        if len(parts) != 3:
            raise ValueError("expected MIN:MAX:N")
        lower, upper, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ConfigError(f"malformed sweep '{text}'", [ErrorDetail(code="sweep", message=str(e))]) from e

    problems = []
    if not np.isfinite(lower) or not np.isfinite(upper):
        problems.append("MIN and MAX must be finite")
    if lower < 0:
        problems.append("MIN must be >= 0")
    if upper < lower:
        problems.append("MAX must be >= MIN")
    if count < 1:
        problems.append("N must be >= 1")
    elif count == 1 and upper != lower:
        problems.append("N = 1 needs MIN = MAX")
    if problems:
        raise ConfigError(f"invalid sweep '{text}'", [ErrorDetail(code="sweep", message=p) for p in problems])
    return np.linspace(lower, upper, count)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def run_spectra(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.config, args.tolerance, require_probe=False)
    process = Process(args.process)
    inputs = scenario.inputs_for(process)
    model, config = scenario.model, scenario.quadrature

    if process is Process.DFG:
        frame = spectrum_frame(dfg_spectrum(model, inputs, config))
    elif process is Process.SFG:
        frame = spectrum_frame(sfg_spectrum(model, inputs, config))
    else:
        frame = biphoton_frame(spdc_biphoton(model, inputs, config))
    write_csv(frame, args.out)
    return EXIT_OK


def run_ratios(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.config, args.tolerance)
    spdc = scenario.inputs_for(Process.SPDC)
    dfg = scenario.inputs_for(Process.DFG)
    sfg = scenario.inputs_for(Process.SFG)
    model, probe, config = scenario.model, scenario.probe, scenario.quadrature

    if args.strict:
        wide = narrowness_warnings(
            model, {"DFG seed": dfg.seed, "SFG signal": sfg.signal, "SFG idler": sfg.idler, "SPDC pump": spdc.pump}
        )
        if wide:
            raise ConfigError(
                "fields are not spectrally narrow (--strict)",
                [ErrorDetail(code="inputs", message=message) for message in wide],
            )

    dfg_report = ratio_dfg(model, spdc, dfg, probe.ks, probe.ki, config)
    sfg_report = ratio_sfg(model, spdc, sfg, probe.ks, probe.ki, probe.kp, config)

    payload = RatiosRunPayload(
        scenario=scenario.name,
        tolerance=config.tolerance,
        probe=ProbePayload(k_s=probe.ks, k_i=probe.ki, k_p=probe.kp),
        dfg=RatioPayload.from_report(dfg_report),
        sfg=RatioPayload.from_report(sfg_report),
        warnings=list(dict.fromkeys(dfg_report.warnings + sfg_report.warnings)),
    )
    write_json(payload, args.out)
    return EXIT_OK


def run_figure2(args: argparse.Namespace) -> int:
    if not args.beta_sh_T >= 0:
        raise ConfigError("--beta-sh-T must be >= 0",
                          [ErrorDetail(code="beta_sh_T", message=f"got {args.beta_sh_T}")])
    sweep = parse_sweep(args.sweep)
    # time in units of T
    curve = figure2_curve(beta_sh=args.beta_sh_T, T=1.0, sweep=sweep)
    write_csv(figure2_frame(curve), args.out)
    return EXIT_OK


def run_oracle_check(args: argparse.Namespace) -> int:
    checks = run_fock_checks()
    if args.config is not None:
        scenario = load_scenario(args.config)
        checks += compare_with_oracle(scenario, tolerance=args.tolerance)
    write_csv(oracle_frame(checks), args.out)

    failed = [check.name for check in checks if not check.passed]
    if failed:
        logger.error("Oracle checks failed: %s", ", ".join(failed))
        return EXIT_FAILURE
    logger.info("All %d oracle checks passed", len(checks))
    return EXIT_OK


def run_convergence(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.config, args.tolerance)
    rows = convergence_report(scenario, levels=args.levels)
    write_csv(convergence_frame(rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setsim",
        description="Classical vs. quantum three-wave mixing in a lossy chi-2 waveguide",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (default: SETSIM_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    spectra = sub.add_parser("spectra", help="Generated spectrum (dfg, sfg) or biphoton (spdc) as CSV")
    spectra.add_argument("--config", required=True, help="Scenario file")
    spectra.add_argument("--process", required=True, choices=[p.value for p in Process])
    spectra.add_argument("--out", default=None, help="Output CSV (default: stdout)")
    spectra.add_argument("--tolerance", type=float, default=None, help="Time-quadrature tolerance")
    spectra.set_defaults(handler=run_spectra)

    ratios = sub.add_parser("ratios", help="R^DFG and R^SFG as JSON")
    ratios.add_argument("--config", required=True, help="Scenario file")
    ratios.add_argument("--out", default=None, help="Output JSON (default: stdout)")
    ratios.add_argument("--tolerance", type=float, default=None, help="Time-quadrature tolerance")
    ratios.add_argument("--strict", action="store_true", help="Fail when a field is not spectrally narrow")
    ratios.set_defaults(handler=run_ratios)

    figure2 = sub.add_parser("figure2", help="Delta-difference sweep over F-band loss as CSV")
    figure2.add_argument("--beta-sh-T", dest="beta_sh_T", type=float, default=1.0, help="beta_SH * T")
    figure2.add_argument("--sweep", default="0:2:201", help="MIN:MAX:N of beta / beta_SH")
    figure2.add_argument("--out", default=None, help="Output CSV (default: stdout)")
    figure2.set_defaults(handler=run_figure2)

    oracle = sub.add_parser("oracle-check", help="Fock-space and high-resolution checks as CSV")
    oracle.add_argument("--config", default=None, help="Scenario to recompute at higher resolution")
    oracle.add_argument("--out", default=None, help="Output CSV (default: stdout)")
    oracle.add_argument("--tolerance", type=float, default=1e-4, help="Relative tolerance for scenario rows")
    oracle.set_defaults(handler=run_oracle_check)

    convergence = sub.add_parser("convergence", help="k- and t-refinement table as CSV")
    convergence.add_argument("--config", required=True, help="Scenario file")
    convergence.add_argument("--out", default=None, help="Output CSV (default: stdout)")
    convergence.add_argument("--tolerance", type=float, default=None, help="Time-quadrature tolerance")
    convergence.add_argument("--levels", type=int, default=3, help="Refinement levels per axis")
    convergence.set_defaults(handler=run_convergence)

    return parser


def _report(exc: SimulationError) -> None:
    print(f"error [{exc.code}]: {exc}", file=sys.stderr)
    for detail in getattr(exc, "details", []):
        print(f"  - {detail}", file=sys.stderr)
    if isinstance(exc, ConvergenceError):
        print(f"  achieved tolerance {exc.achieved_tolerance:.3e}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(level_from_name(args.log_level or get_settings().log_level))
    logger.debug("setsim %s: %s", __version__, args.command)
    try:
        return args.handler(args)
    except SimulationError as exc:
        _report(exc)
        return exc.exit_status
