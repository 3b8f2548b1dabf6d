import hashlib
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from dprisacplots import FigureSpec, SchemaError, render
from dprisacplots.cli import main as cli_main
from dprisacplots import style


def _write(path, header, rows):
    lines = [",".join(header)] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def fixtures(tmp_path):
    """Small synthetic CSVs covering every documented schema."""
    out = {}
    out["convergence"] = _write(
        tmp_path / "convergence.csv", ["l", "seed", "iteration", "sum_rate_nats"],
        [[l, 0, i, 10 + l / 10 + i * 0.5] for l in (10, 20) for i in range(1, 6)])
    out["convergence_residuals"] = _write(
        tmp_path / "convergence_residuals.csv",
        ["iteration", "objective", "res_x", "res_y", "res_z"],
        [[i, -5.0 - i, 10.0 ** (-i), 10.0 ** (-i - 1), 10.0 ** (-i - 2)]
         for i in range(1, 8)])
    out["sp_comparison"] = _write(
        tmp_path / "sp_comparison.csv", ["n_t", "variant", "seed", "sum_rate_nats"],
        [[nt, var, s, 10 + nt + {"sp1x": 0, "dp": 6, "sp2x": 9}[var] + 0.1 * s]
         for nt in (4, 6) for var in ("sp1x", "dp", "sp2x") for s in range(3)])
    out["sp_comparison_summary"] = _write(
        tmp_path / "sp_comparison_summary.csv",
        ["n_t", "variant", "mean_rate_nats", "stderr", "n"],
        [[nt, var, 10 + nt, 0.3, 3] for nt in (4, 6) for var in ("sp1x", "dp")])
    out["quantization"] = _write(
        tmp_path / "quantization.csv",
        ["n_t", "variant", "mode", "bits", "seed", "sum_rate_nats"],
        [[6, "dp", "continuous", 0, s, 24 + 0.1 * s] for s in range(3)]
        + [[6, "dp", "quantized", b, s, 24 - 4.0 / b + 0.1 * s]
           for b in (1, 2, 3, 4) for s in range(3)])
    out["quantization_summary"] = _write(
        tmp_path / "quantization_summary.csv",
        ["n_t", "variant", "mode", "bits", "mean_rate_nats", "stderr", "n"],
        [[6, "dp", "continuous", 0, 24.0, 0.1, 3]]
        + [[6, "dp", "quantized", b, 24 - 4.0 / b, 0.1, 3] for b in (1, 2, 3)])
    out["xpd_sweep"] = _write(
        tmp_path / "xpd_sweep.csv",
        ["l", "xpd_los_db", "xpd_nlos_db", "seed", "sum_rate_nats"],
        [[l, los, los + 3, s, 15 + l / 20 + los / 4 + 0.1 * s]
         for l in (10, 40) for los in (1, 5, 9) for s in range(3)])
    out["snr_tradeoff"] = _write(
        tmp_path / "snr_tradeoff.csv",
        ["n_t", "gamma_th_db", "seed", "sum_rate_nats"],
        [[6, g, s, 25 - (g - 20) ** 1.5 + 0.1 * s]
         for g in (20, 22, 24, 26) for s in range(3)])
    angles = np.linspace(-90, 90, 181)
    pv = 1e-3 + np.exp(-((angles + 20) / 4.0) ** 2)
    ph = 1e-3 + np.exp(-((angles - 40) / 4.0) ** 2)
    out["beampattern"] = _write(
        tmp_path / "beampattern.csv", ["angle_deg", "pv", "ph", "ptotal"],
        [[a, v, h, v + h] for a, v, h in zip(angles, pv, ph)])
    return out


ALL_CASES = [("convergence", "convergence"),
             ("convergence", "convergence_residuals"),
             ("sp_comparison", "sp_comparison"),
             ("sp_comparison", "sp_comparison_summary"),
             ("quantization", "quantization"),
             ("quantization", "quantization_summary"),
             ("xpd_sweep", "xpd_sweep"),
             ("snr_tradeoff", "snr_tradeoff"),
             ("beampattern", "beampattern")]


class TestSchemas:
    @pytest.mark.parametrize("experiment,fixture", ALL_CASES)
    def test_all_schemas_render(self, experiment, fixture, fixtures, tmp_path):
        out = tmp_path / f"{fixture}.png"
        path = render(FigureSpec(experiment, fixtures[fixture], str(out)))
        assert out.exists() and out.stat().st_size > 1000
        assert path == str(out)

    def test_mismatched_header_reports_diff(self, fixtures, tmp_path):
        with pytest.raises(SchemaError) as err:
            render(FigureSpec("beampattern", fixtures["xpd_sweep"],
                              str(tmp_path / "x.png")))
        assert "missing" in str(err.value) and "angle_deg" in str(err.value)

    def test_empty_csv_errors(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SchemaError):
            render(FigureSpec("beampattern", str(empty), str(tmp_path / "x.png")))

    def test_header_only_errors(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text("angle_deg,pv,ph,ptotal\n")
        with pytest.raises(SchemaError):
            render(FigureSpec("beampattern", str(p), str(tmp_path / "x.png")))

    def test_unknown_experiment(self, fixtures, tmp_path):
        with pytest.raises(SchemaError):
            FigureSpec("mystery", fixtures["beampattern"], str(tmp_path / "x.png"))


class TestRenderProperties:
    def test_deterministic_output(self, fixtures, tmp_path):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render(FigureSpec("beampattern", fixtures["beampattern"], str(a)))
        render(FigureSpec("beampattern", fixtures["beampattern"], str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_input_never_mutated(self, fixtures, tmp_path):
        before = hashlib.sha256(open(fixtures["xpd_sweep"], "rb").read()).hexdigest()
        render(FigureSpec("xpd_sweep", fixtures["xpd_sweep"], str(tmp_path / "x.png")))
        after = hashlib.sha256(open(fixtures["xpd_sweep"], "rb").read()).hexdigest()
        assert before == after


def _peak_angle(img, mask_fn):
    """Angle of the topmost pixel of a pure-colored curve, via the fixed layout."""
    arr = np.asarray(img.convert("RGB")).astype(int)
    h, w, _ = arr.shape
    x0 = style.AXES_RECT[0] * w
    x1 = (style.AXES_RECT[0] + style.AXES_RECT[2]) * w
    mask = mask_fn(arr)
    cols = np.where(mask.any(axis=0))[0]
    best_col, best_row = None, h
    for c in cols:
        r = int(np.argmax(mask[:, c]))
        if r < best_row:
            best_row, best_col = r, c
    assert best_col is not None, "curve color not found in image"
    return -90.0 + (best_col - x0) * 180.0 / (x1 - x0)


class TestCli:
    def test_render_subcommand(self, fixtures, tmp_path, capsys):
        out = tmp_path / "fig.png"
        code = cli_main(["render", "--experiment", "snr_tradeoff",
                         "--csv", fixtures["snr_tradeoff"], "--out", str(out)])
        assert code == 0 and out.exists()

    def test_schema_error_exit_code(self, fixtures, tmp_path, capsys):
        code = cli_main(["render", "--experiment", "beampattern",
                         "--csv", fixtures["xpd_sweep"],
                         "--out", str(tmp_path / "x.png")])
        assert code == 1
        assert "schema error" in capsys.readouterr().err

    def test_bad_experiment_usage(self, fixtures, tmp_path):
        code = cli_main(["render", "--experiment", "bogus",
                         "--csv", fixtures["beampattern"],
                         "--out", str(tmp_path / "x.png")])
        assert code == 2


@pytest.fixture(scope="module")
def real_csv(tmp_path_factory):
    """Beampattern produced through the primary package's CLI (the external interface)."""
    out = tmp_path_factory.mktemp("bp")
    res = subprocess.run(
        [sys.executable, "-m", "dprisac.cli", "experiment", "beampattern",
         "--out", str(out), "--quiet"],
        capture_output=True, text=True, timeout=600)
    assert res.returncode == 0, res.stderr
    return out / "beampattern.csv"


class TestBeampatternLobes:
    """Criterion 13 smoke test: the rendered image shows both target lobes."""

    def test_lobes_at_targets_by_pixel_peaks(self, real_csv, tmp_path):
        img_path = tmp_path / "beampattern.png"
        render(FigureSpec("beampattern", str(real_csv), str(img_path)))
        img = Image.open(img_path)

        blue = _peak_angle(img, lambda a: (a[:, :, 2] > 200) & (a[:, :, 0] < 80)
                           & (a[:, :, 1] < 80))
        red = _peak_angle(img, lambda a: (a[:, :, 0] > 200) & (a[:, :, 2] < 80)
                          & (a[:, :, 1] < 80))
        assert abs(blue - (-20.0)) <= 5.0, f"vertical lobe at {blue:.1f} deg"
        assert abs(red - 40.0) <= 5.0, f"horizontal lobe at {red:.1f} deg"
