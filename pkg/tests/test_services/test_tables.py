import io
import json

import numpy as np
import pandas as pd
import pytest

from setsim.core.convergence import RefinementRow
from setsim.core.errors import ConfigError
from setsim.core.model import Band
from setsim.core.observables import BiphotonAmplitude, SpectralAmplitude
from setsim.core.oracle import OracleCheck
from setsim.core.quadrature import Grid1D
from setsim.core.ratios import figure2_curve
from setsim.schemas.reports import ProbePayload
from setsim.services.tables import (
    biphoton_frame,
    convergence_frame,
    figure2_frame,
    oracle_frame,
    read_loss_table,
    spectrum_frame,
    write_csv,
    write_json,
)


class TestReadLossTable:
    """Test parsing of `k beta` loss tables."""

    def test_bundled_table(self, scenario_path):
        table = read_loss_table(scenario_path("g1").parent.parent / "tables" / "f_band_loss.txt")
        assert table.k_knots == (-10.0, -4.0, 0.0, 4.0, 10.0)
        assert table.beta_knots == (0.2, 0.2, 0.35, 0.5, 0.5)

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "loss.txt"
        path.write_text("# k beta\n\n0.0 0.1\n1.0  0.3  # edge\n", encoding="utf-8")
        table = read_loss_table(path)
        assert table.evaluate(0.5) == pytest.approx(0.2)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_loss_table(tmp_path / "absent.txt")

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "loss.txt"
        path.write_text("0.0 low\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_loss_table(path)

    def test_single_column(self, tmp_path):
        path = tmp_path / "loss.txt"
        path.write_text("0.0\n1.0\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_loss_table(path)

    def test_descending_knots(self, tmp_path):
        path = tmp_path / "loss.txt"
        path.write_text("1.0 0.1\n0.0 0.1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_loss_table(path)

    def test_negative_rate(self, tmp_path):
        path = tmp_path / "loss.txt"
        path.write_text("0.0 -0.1\n1.0 0.1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_loss_table(path)


class TestFrames:
    def test_spectrum_columns(self):
        grid = Grid1D(-1.0, 1.0, 3)
        frame = spectrum_frame(SpectralAmplitude(Band.F, grid, np.array([1j, 2.0, 0.0])))
        assert list(frame.columns) == ["k", "re_A", "im_A", "density"]
        assert frame["density"].tolist() == [1.0, 4.0, 0.0]

    def test_biphoton_row_order(self):
        grid = Grid1D(0.0, 1.0, 2)
        amplitude = np.array([[1.0, 2.0j], [2.0j, 0.5]])
        frame = biphoton_frame(BiphotonAmplitude(grid, amplitude))
        assert list(frame.columns) == ["k1", "k2", "re_G", "im_G", "pair_density"]
        assert frame[["k1", "k2"]].values.tolist() == [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]
        assert frame["pair_density"].tolist() == [2.0, 8.0, 8.0, 0.5]

    def test_figure2_columns(self):
        frame = figure2_frame(figure2_curve(1.0, 1.0, np.linspace(0.0, 2.0, 5)))
        assert list(frame.columns) == [
            "beta_over_betaSH",
            "delta_minus",
            "delta_plus",
            "scaled_abs_difference",
            "attenuated_abs_difference",
        ]
        assert len(frame) == 5

    def test_convergence_long_format(self):
        rows = [
            RefinementRow("k", 0, 9, 9, 128, {"spdc_pair": 4.0, "dfg_single": 1.0}, float("nan")),
            RefinementRow("k", 1, 17, 17, 128, {"spdc_pair": 4.0, "dfg_single": 1.0}, 0.0),
        ]
        frame = convergence_frame(rows)
        assert len(frame) == 4
        assert frame["observable"].tolist() == ["dfg_single", "spdc_pair", "dfg_single", "spdc_pair"]

    def test_oracle_columns(self):
        frame = oracle_frame([OracleCheck("a", 1.0, 1.0, 1e-9)])
        assert list(frame.columns) == ["check", "expected", "actual", "error", "tolerance", "passed"]
        assert bool(frame["passed"].iloc[0])


class TestWriters:
    """Test deterministic CSV and JSON output."""

    def test_csv_round_trip(self, tmp_path):
        values = np.array([1.0 / 3.0, np.pi * 1e-20, -2.0 ** 0.5])
        out = tmp_path / "nested" / "values.csv"
        write_csv(pd.DataFrame({"x": values}), out)
        parsed = pd.read_csv(out, float_precision="round_trip")
        assert parsed["x"].tolist() == values.tolist()

    def test_csv_to_stdout(self, capsys):
        write_csv(pd.DataFrame({"a": [0.5], "b": [2]}))
        assert capsys.readouterr().out == "a,b\n0.5,2\n"

    def test_csv_line_endings(self, tmp_path):
        out = tmp_path / "t.csv"
        write_csv(pd.DataFrame({"a": [1.0, 2.0]}), out)
        assert b"\r" not in out.read_bytes()

    def test_json_sorted_with_newline(self, tmp_path):
        out = tmp_path / "probe.json"
        write_json(ProbePayload(k_s=-0.5, k_i=0.5, k_p=0.1), out)
        text = out.read_text(encoding="utf-8")
        assert text.endswith("}\n")
        assert list(json.loads(text)) == ["k_i", "k_p", "k_s"]
        assert json.load(io.StringIO(text))["k_p"] == 0.1
