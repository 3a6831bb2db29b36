"""
Tables Service
pandas frames for every emitted table, deterministic CSV/JSON writers and
the loss-table reader.
"""

import json
import sys
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..core.convergence import RefinementRow
from ..core.errors import ConfigError, SimulationError
from ..core.logging_config import get_logger
from ..core.model import TableLoss
from ..core.observables import BiphotonAmplitude, SpectralAmplitude
from ..core.oracle import OracleCheck
from ..core.ratios import DeltaCurve

# Logger for this module
logger = get_logger(__name__)

# Full round-trip precision for doubles
FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


# ---------------------------------------------------------------------------
# Readers
# ---------------------------------------------------------------------------

def read_loss_table(path: PathLike) -> TableLoss:
    """
    Two-column `k beta` text table, ascending k, '#' comments allowed.

    Raises:
        ConfigError: file missing, unparsable, or not a valid table
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"loss table not found: {path}")
    try:
        df = pd.read_csv(path, sep=r"\s+", comment="#", header=None, names=["k", "beta"], dtype=float)
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"loss table {path} does not parse: {e}") from e
    if df.empty or df.isna().any().any():
        raise ConfigError(f"loss table {path} needs two numeric columns on every row")
    try:
        table = TableLoss(tuple(df["k"]), tuple(df["beta"]))
    except SimulationError as e:
        raise ConfigError(f"loss table {path}: {e}") from e
    logger.debug("Loaded loss table %s (%d knots)", path, len(df))
    return table


# ---------------------------------------------------------------------------
# Frames
# ---------------------------------------------------------------------------

def spectrum_frame(spectrum: SpectralAmplitude) -> pd.DataFrame:
    return pd.DataFrame({
        "k": spectrum.k,
        "re_A": spectrum.amplitude.real,
        "im_A": spectrum.amplitude.imag,
        "density": spectrum.density,
    })


def biphoton_frame(biphoton: BiphotonAmplitude) -> pd.DataFrame:
    """One row per (k1, k2) cell, ascending k1 then k2."""
    k = biphoton.grid.points
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    return pd.DataFrame({
        "k1": k1.ravel(),
        "k2": k2.ravel(),
        "re_G": biphoton.amplitude.real.ravel(),
        "im_G": biphoton.amplitude.imag.ravel(),
        "pair_density": biphoton.pair_density.ravel(),
    })


def figure2_frame(curve: DeltaCurve) -> pd.DataFrame:
    return pd.DataFrame({
        "beta_over_betaSH": curve.beta_over_beta_sh,
        "delta_minus": curve.delta_minus,
        "delta_plus": curve.delta_plus,
        "scaled_abs_difference": curve.scaled_abs_difference,
        "attenuated_abs_difference": curve.attenuated_abs_difference,
    })


def convergence_frame(rows: Sequence[RefinementRow]) -> pd.DataFrame:
    """Long format: one line per (refinement row, density)."""
    records = [
        {
            "axis": row.axis,
            "level": row.level,
            "n_F": row.n_f,
            "n_SH": row.n_sh,
            "t_nodes": row.t_nodes,
            "observable": name,
            "value": value,
            "relative_change": row.relative_change,
        }
        for row in rows
        for name, value in sorted(row.densities.items())
    ]
    columns = ["axis", "level", "n_F", "n_SH", "t_nodes", "observable", "value", "relative_change"]
    return pd.DataFrame.from_records(records, columns=columns)


def oracle_frame(checks: Sequence[OracleCheck]) -> pd.DataFrame:
    return pd.DataFrame.from_records(
        [
            {
                "check": check.name,
                "expected": check.expected,
                "actual": check.actual,
                "error": check.error,
                "tolerance": check.tolerance,
                "passed": check.passed,
            }
            for check in checks
        ],
        columns=["check", "expected", "actual", "error", "tolerance", "passed"],
    )


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def _emit(text: str, out: Optional[PathLike]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" on every platform
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info("Wrote %s", path)


def write_csv(frame: pd.DataFrame, out: Optional[PathLike] = None) -> None:
    """CSV with header, no index, 17 significant digits; stdout when out is None."""
    _emit(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"), out)


def write_json(payload: BaseModel, out: Optional[PathLike] = None) -> None:
    """Sorted-key JSON with a trailing newline; floats keep their shortest round-trip form."""
    text = json.dumps(payload.model_dump(mode="json"), sort_keys=True, indent=2, allow_nan=True)
    _emit(text + "\n", out)
