import math
from pathlib import Path

import numpy as np
import pytest

from fxregime.cli import main
from fxregime.pricing import black_scholes_call

ONE_STATE_CONFIG = """\
n_states = 1
mu = 0.0
sigma = 0.2
lambda = 0.0
r_d = 0.02
r_f = 0.0
generator = 0.0
"""


def read_rows(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


@pytest.fixture()
def one_state_config(tmp_path):
    path = tmp_path / "one_state.cfg"
    path.write_text(ONE_STATE_CONFIG)
    return str(path)


class TestPriceSweep:
    def test_no_jump_single_state_equals_black_scholes(self, tmp_path, one_state_config):
        out = tmp_path / "sweep.csv"
        code = main([
            "price-sweep", "--config", one_state_config, "--curves", "no_jump",
            "--approx-num", "64", "--seed", "1", "--out", str(out),
        ])
        assert code == 0
        header, rows = read_rows(out)
        assert header == ["s_over_k", "curve", "price", "std_error"]
        assert len(rows) == 10
        for row in rows:
            sk = float(row["s_over_k"])
            want = black_scholes_call(1.0, 1.0 / sk, 0.5, 0.02, 0.04)
            assert float(row["price"]) == pytest.approx(want, abs=1e-12)
            assert float(row["std_error"]) == 0.0

    def test_jump_curves_dominate_no_jump(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["price-sweep", "--approx-num", "2000", "--seed", "3", "--out", str(out)])
        assert code == 0
        _, rows = read_rows(out)
        by_point = {}
        for row in rows:
            by_point.setdefault(row["s_over_k"], {})[row["curve"]] = float(row["price"])
        assert len(by_point) == 10
        for prices in by_point.values():
            assert prices["double_exponential"] >= prices["no_jump"] - 1e-12
            assert prices["normal"] >= prices["no_jump"] - 1e-12

    def test_byte_identical_reruns(self, tmp_path):
        args = ["price-sweep", "--approx-num", "500", "--seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_row_bounds(self, tmp_path):
        out = tmp_path / "sweep.csv"
        main(["price-sweep", "--approx-num", "400", "--seed", "5", "--out", str(out)])
        _, rows = read_rows(out)
        for row in rows:
            price = float(row["price"])
            assert 0.0 <= price <= 1.0 / float(row["s_over_k"]) + 1e-12
            assert 0.0 <= price <= 1.0 + 1e-12
            assert math.isfinite(float(row["std_error"]))

    def test_round_flag(self, tmp_path):
        out = tmp_path / "sweep.csv"
        main(["price-sweep", "--approx-num", "64", "--seed", "1", "--round", "4", "--out", str(out)])
        _, rows = read_rows(out)
        for row in rows:
            assert len(row["price"].split(".")[-1]) <= 4

    def test_plot_written(self, tmp_path):
        out = tmp_path / "sweep.csv"
        png = tmp_path / "sweep.png"
        code = main([
            "price-sweep", "--approx-num", "128", "--seed", "1",
            "--out", str(out), "--plot", str(png),
        ])
        assert code == 0
        assert png.stat().st_size > 1000

    def test_stdout_emission(self, capsys):
        code = main(["price-sweep", "--approx-num", "32", "--seed", "1", "--curves", "no_jump"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "s_over_k,curve,price,std_error"
        assert len(lines) == 11


class TestThetaSweep:
    def test_admissible_grid_prices_are_finite(self, tmp_path):
        out = tmp_path / "theta.csv"
        code = main([
            "theta-sweep", "--theta1-min", "2", "--theta1-max", "6", "--theta1-step", "2",
            "--approx-num", "400", "--seed", "2", "--out", str(out),
        ])
        assert code == 0
        _, rows = read_rows(out)
        assert len(rows) == 3
        for row in rows:
            assert row["error"] == ""
            assert 0.0 < float(row["price"]) < 1.0

    def test_inadmissible_point_is_flagged_and_sweep_continues(self, tmp_path):
        out = tmp_path / "theta.csv"
        code = main([
            "theta-sweep", "--theta1-min", "0.5", "--theta1-max", "4.5", "--theta1-step", "2",
            "--approx-num", "200", "--seed", "2", "--out", str(out),
        ])
        assert code == 1
        _, rows = read_rows(out)
        assert rows[0]["error"] == "theta1-not-above-1"
        assert rows[0]["price"] == "nan"
        assert rows[1]["error"] == "" and rows[2]["error"] == ""

    def test_boundary_point_prices_or_flags(self, tmp_path):
        out = tmp_path / "theta.csv"
        code = main([
            "theta-sweep", "--theta1-min", "1.01", "--theta1-max", "1.01", "--theta1-step", "1",
            "--approx-num", "200", "--seed", "2", "--out", str(out),
        ])
        _, rows = read_rows(out)
        assert len(rows) == 1
        if rows[0]["error"]:
            assert code == 1
        else:
            assert code == 0
            assert math.isfinite(float(rows[0]["price"]))

    def test_plot_written(self, tmp_path):
        png = tmp_path / "theta.png"
        code = main([
            "theta-sweep", "--theta1-min", "4", "--theta1-max", "8", "--theta1-step", "2",
            "--approx-num", "100", "--seed", "2", "--out", str(tmp_path / "t.csv"),
            "--plot", str(png),
        ])
        assert code == 0
        assert png.stat().st_size > 1000


class TestCalibrate:
    def write_series(self, tmp_path, pips):
        path = tmp_path / "opens.csv"
        path.write_text("".join(f"{1.0 + p * 1e-4:.6f}\n" for p in pips))
        return str(path)

    def test_uptrend_with_populated_rows(self, tmp_path, capsys):
        pips = [0, 0, 0, 0, -40, 0] + list(24 * np.arange(1, 15))
        path = self.write_series(tmp_path, pips)
        code = main([
            "calibrate", "--input", path,
            "--candles-back-up", "2", "--candles-back-down", "2",
            "--candles-up", "2", "--candles-down", "2",
        ])
        assert code == 0
        output = capsys.readouterr().out
        assert "probability matrix:" in output
        assert "up       1.0000  0.0000  0.0000" in output
        assert "stationary distribution:" in output

    def test_hand_traced_fixture_printed_at_four_decimals(self, tmp_path, capsys):
        from test_calibration import HAND_COUNTS, HAND_PIPS

        path = self.write_series(tmp_path, HAND_PIPS)
        code = main([
            "calibrate", "--input", path,
            "--candles-back-up", "2", "--candles-back-down", "2",
            "--candles-up", "2", "--candles-down", "2",
        ])
        assert code == 0
        output = capsys.readouterr().out
        counts = np.asarray(HAND_COUNTS, dtype=float)
        matrix = counts / counts.sum(axis=1, keepdims=True)
        for name, row in zip(("up", "down", "sideway"), matrix):
            expected = f"{name:<8} " + "  ".join("%.4f" % v for v in row)
            assert expected in output

    def test_write_model_round_trips(self, tmp_path, capsys):
        from fxregime.modelfile import parse_model_file

        pips = [0, 0, 0, 0, -40, 0] + list(24 * np.arange(1, 15))
        path = self.write_series(tmp_path, pips)
        model_path = tmp_path / "calibrated.cfg"
        code = main([
            "calibrate", "--input", path,
            "--candles-back-up", "2", "--candles-back-down", "2",
            "--candles-up", "2", "--candles-down", "2",
            "--write-model", str(model_path),
        ])
        assert code == 0
        params, chain = parse_model_file(model_path)
        assert chain.n_states == 3
        assert params.n_states == 3
        # the written model must be consumable by the pricing commands
        out = tmp_path / "from_calibrated.csv"
        assert main([
            "price-sweep", "--config", str(model_path), "--approx-num", "64",
            "--seed", "1", "--out", str(out),
        ]) == 0
        assert out.read_text().startswith("s_over_k,curve,price,std_error")

    def test_empty_file_fails_cleanly(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text("")
        code = main(["calibrate", "--input", str(path)])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file_fails_cleanly(self, tmp_path, capsys):
        code = main(["calibrate", "--input", str(tmp_path / "absent.csv")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_degenerate_series_fails_cleanly(self, tmp_path, capsys):
        path = self.write_series(tmp_path, 24 * np.arange(40))
        code = main([
            "calibrate", "--input", path,
            "--candles-back-up", "2", "--candles-back-down", "2",
            "--candles-up", "2", "--candles-down", "2",
        ])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestSelfTest:
    def test_passes_for_solved_model(self, capsys):
        code = main(["selftest", "--paths", "20000", "--seed", "13"])
        assert code == 0
        output = capsys.readouterr().out
        assert "PASS" in output
        assert "estimate" in output

    def test_normal_jump_variant(self, capsys):
        code = main(["selftest", "--jump", "normal", "--paths", "20000", "--seed", "13"])
        assert code == 0
        assert "PASS" in capsys.readouterr().out
