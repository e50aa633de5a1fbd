import json

import pytest

from magband.cli import main

FAST = ["--n-cells", "600", "--jobs", "1"]


def run(args):
    return main([str(a) for a in args])


class TestScanCsv:
    def test_header_rows_and_roundtrip(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = run(
            ["scan", "--family", "axisym", "--m", "0", "--levels", "1,2",
             "--tau-min", "0", "--tau-max", "0.1", "--tau-step", "0.01",
             "--out", out, *FAST]
        )
        assert code == 0
        text = out.read_text(encoding="utf-8")
        lines = text.split("\n")
        assert lines[0] == "tau,level,value,err_est,deriv_fh"
        assert text.endswith("\n") and "\r" not in text
        rows = [line for line in lines[1:] if line]
        assert len(rows) == 11 * 2
        first = rows[0].split(",")
        assert float(first[0]) == 0.0 and first[1] == "1"
        assert float(first[2]) == pytest.approx(2.0, abs=1e-6)
        assert first[4] == ""  # derivative column empty unless requested
        for row in rows:
            for field in row.split(",")[2:4]:
                assert field == f"{float(field):.12g}"  # 12-significant-digit round trip

    def test_grid_row_count_contract(self, tmp_path):
        out = tmp_path / "grid.csv"
        code = run(
            ["scan", "--family", "axisym", "--levels", "1",
             "--tau-min", "0", "--tau-max", "5", "--tau-step", "1",
             "--out", out, *FAST]
        )
        assert code == 0
        rows = [l for l in out.read_text().split("\n")[1:] if l]
        assert len(rows) == 6

    def test_byte_identical_reruns(self, tmp_path):
        args = ["scan", "--family", "degennes-neumann", "--levels", "1",
                "--tau-min", "0", "--tau-max", "0.2", "--tau-step", "0.1", *FAST]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", out1]) == 0
        assert run(args + ["--out", out2]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_with_derivatives(self, tmp_path):
        out = tmp_path / "deriv.csv"
        code = run(
            ["scan", "--family", "axisym", "--levels", "1",
             "--tau-min", "0.5", "--tau-max", "0.6", "--tau-step", "0.1",
             "--with-derivatives", "--out", out, *FAST]
        )
        assert code == 0
        row = out.read_text().split("\n")[1].split(",")
        assert float(row[4]) < 0.0  # decreasing branch

    def test_with_constants_column(self, tmp_path):
        out = tmp_path / "const.csv"
        code = run(
            ["scan", "--family", "degennes-neumann", "--levels", "1",
             "--tau-min", "0", "--tau-max", "0.1", "--tau-step", "0.1",
             "--with-constants", "--out", out, *FAST]
        )
        assert code == 0
        lines = out.read_text().split("\n")
        assert lines[0] == "tau,level,value,err_est,deriv_fh,const_theta0,const_upper_bound"
        row = lines[1].split(",")
        assert float(row[5]) == pytest.approx(0.5901, abs=1e-3)
        assert float(row[6]) == pytest.approx(0.926502, abs=1e-5)

    def test_json_format(self, tmp_path):
        out = tmp_path / "scan.json"
        code = run(
            ["scan", "--family", "axisym", "--levels", "1", "--format", "json",
             "--tau-min", "0", "--tau-max", "0.1", "--tau-step", "0.1",
             "--out", out, *FAST]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["family"] == "axisym"
        assert len(payload["rows"]) == 2
        assert payload["provenance"]["n_cells"] == 600

    def test_invalid_grid_exit_2(self):
        assert run(["scan", "--family", "axisym", "--tau-min", "1",
                    "--tau-max", "0", "--tau-step", "0.1", *FAST]) == 2

    def test_invalid_levels_exit_2(self):
        assert run(["scan", "--family", "axisym", "--levels", "1,9",
                    "--tau-min", "0", "--tau-max", "1", "--tau-step", "0.5", *FAST]) == 2

    def test_derivatives_unsupported_family_exit_2(self):
        assert run(["scan", "--family", "degennes-dirichlet", "--levels", "1",
                    "--tau-min", "0", "--tau-max", "1", "--tau-step", "0.5",
                    "--with-derivatives", *FAST]) == 2


class TestScanPlots:
    def test_band_and_gap_figures(self, tmp_path):
        out = tmp_path / "scan.csv"
        band_png = tmp_path / "bands.png"
        gap_png = tmp_path / "gap.png"
        code = run(
            ["scan", "--family", "axisym", "--levels", "1,2",
             "--tau-min", "0", "--tau-max", "1", "--tau-step", "0.25",
             "--out", out, "--plot", band_png, "--plot-gap", gap_png, *FAST]
        )
        assert code == 0
        assert band_png.stat().st_size > 1000
        assert gap_png.stat().st_size > 1000
        assert out.exists()

    def test_plot_gap_needs_both_levels(self, tmp_path):
        code = run(
            ["scan", "--family", "axisym", "--levels", "1",
             "--tau-min", "0", "--tau-max", "1", "--tau-step", "0.5",
             "--plot-gap", tmp_path / "gap.png", *FAST]
        )
        assert code == 2


class TestMinimize:
    def test_axisym_certified(self, tmp_path):
        out = tmp_path / "min.json"
        code = run(["minimize", "--family", "axisym", "--out", out, *FAST])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["tau_star"] == pytest.approx(1.53, abs=0.02)
        assert payload["value"] == pytest.approx(0.8630, abs=5e-3)
        assert payload["certified"] is True
        assert payload["certificate"]["derivative_left"] < 0.0
        assert payload["certificate"]["derivative_right"] > 0.0

    def test_degennes_certified(self, tmp_path):
        out = tmp_path / "dg.json"
        code = run(["minimize", "--family", "degennes-neumann", "--out", out, *FAST])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["tau_star"] == pytest.approx(0.7682, abs=2e-3)
        assert payload["value"] == pytest.approx(0.5901, abs=1e-3)

    def test_bad_bracket_exit_2(self, tmp_path):
        code = run(["minimize", "--family", "axisym", "--bracket", "4", "5",
                    "--out", tmp_path / "x.json", *FAST])
        assert code == 2

    def test_uncertified_exit_3(self, tmp_path):
        # A bracket-width target wider than the bracket stops the search
        # immediately; the best golden probe is not a certified minimum.
        out = tmp_path / "loose.json"
        code = run(["minimize", "--family", "axisym", "--min-width", "3.0",
                    "--out", out, *FAST])
        assert code == 3
        assert json.loads(out.read_text())["certified"] is False


class TestVerify:
    def test_hermite_suite_passes(self, tmp_path):
        out = tmp_path / "verify.json"
        code = run(["verify", "--suite", "hermite", "--out", out, *FAST])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["passed"] is True
        names = {c["name"] for c in payload["checks"]}
        assert "second-order-energy" in names


class TestAsymptotics:
    def test_axisym_fit(self, tmp_path):
        out = tmp_path / "fit.json"
        code = run(["asymptotics", "--family", "axisym", "--levels", "1",
                    "--out", out, *FAST])
        assert code == 0
        payload = json.loads(out.read_text())
        fit = payload["fits"][0]
        assert fit["c2"] == pytest.approx(-0.25, abs=0.02)
        assert fit["c0"] == pytest.approx(1.0, abs=1e-3)

    def test_magnetic_fit_with_plot(self, tmp_path):
        out = tmp_path / "fit2.json"
        png = tmp_path / "fit.png"
        code = run(["asymptotics", "--family", "axisym", "--m", "2", "--levels", "1",
                    "--plot", png, "--out", out, *FAST])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["fits"][0]["c2"] == pytest.approx(3.75, abs=0.2)
        assert png.stat().st_size > 1000

    def test_tail_check(self, tmp_path):
        out = tmp_path / "tail.json"
        code = run(["asymptotics", "--family", "degennes-neumann",
                    "--tau-min", "2.8", "--tau-max", "3.2", "--n-samples", "3",
                    "--out", out, *FAST])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["tail_check"]["in_window"] is True
        assert payload["tail_check"]["neumann_below"] is True

    def test_invalid_range_exit_2(self, tmp_path):
        code = run(["asymptotics", "--family", "axisym", "--tau-min", "2",
                    "--tau-max", "12", "--out", tmp_path / "x.json", *FAST])
        assert code == 2
