import json
import shutil
import subprocess
import sys

import numpy as np
import pytest
from matplotlib.image import imread

from whplots import render
from whplots.render import fit_decay_rate


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v!r}" if not isinstance(v, str) else v
                              for v in row) + "\n")


@pytest.fixture()
def field_csv(tmp_path):
    path = tmp_path / "field.csv"
    rows = []
    for y in np.linspace(-1, 1, 12):
        for x in np.linspace(-1, 1, 10):
            rows.append((float(x), float(y), float(np.cos(3 * x)), float(np.sin(2 * y)), 0))
    write_csv(path, ["x", "y", "re", "im", "masked"], rows)
    return str(path)


class TestKinds:
    def test_field(self, field_csv, tmp_path):
        out = str(tmp_path / "f.png")
        meta = render("field", field_csv, out)
        assert meta["kind"] == "field"
        assert imread(out).shape[-1] in (3, 4)

    def test_unknown_kind(self, field_csv, tmp_path):
        with pytest.raises(ValueError):
            render("sparkline", field_csv, str(tmp_path / "x.png"))

    def test_schema_mismatch_fails(self, tmp_path):
        bad = tmp_path / "bad.csv"
        write_csv(bad, ["foo", "bar"], [(1.0, 2.0)])
        with pytest.raises((ValueError, KeyError)):
            render("rho_sweep", str(bad), str(tmp_path / "x.png"))


class TestPhasePortrait:
    def test_constant_argument_uniform_hue(self, tmp_path):
        path = tmp_path / "const.csv"
        rows = []
        for y in np.linspace(-1, 1, 8):
            for x in np.linspace(-1, 1, 8):
                mag = 1.0 + 0.5 * x * y
                rows.append((float(x), float(y), float(mag * np.cos(0.7)),
                             float(mag * np.sin(0.7)), 0))
        write_csv(path, ["x", "y", "re", "im", "masked"], rows)
        out = str(tmp_path / "p.png")
        render("phase_portrait", str(path), out)
        img = imread(out).astype(np.float64)
        # interior pixels (away from axes/labels) must be a single colour
        h, w = img.shape[:2]
        inner = img[int(0.4 * h):int(0.6 * h), int(0.4 * w):int(0.6 * w), :3]
        assert np.ptp(inner.reshape(-1, 3), axis=0).max() <= 1.0 / 255.0

    def test_varying_argument_not_uniform(self, tmp_path, field_csv):
        out = str(tmp_path / "p2.png")
        render("phase_portrait", field_csv, out)
        img = imread(out)
        h, w = img.shape[:2]
        inner = img[int(0.35 * h):int(0.65 * h), int(0.35 * w):int(0.65 * w), :3]
        assert inner.std(axis=(0, 1)).max() > 0.01


class TestConvergence:
    def test_geometric_decay_slope(self, tmp_path):
        path = tmp_path / "conv.csv"
        j = np.arange(25)
        write_csv(path, ["j", "err_a"], [(int(n), float(0.5 ** n)) for n in j])
        out = str(tmp_path / "c.png")
        meta = render("convergence", str(path), out)
        assert abs(meta["fitted_slope"] - np.log(0.5)) <= 0.01 * abs(np.log(0.5))

    def test_fit_decay_rate_direct(self):
        j = np.arange(30)
        assert fit_decay_rate(j, 0.5 ** j) == pytest.approx(np.log(0.5), rel=1e-12)


class TestRhoSweep:
    def test_geometry_markers(self, tmp_path):
        path = tmp_path / "rho.csv"
        alphas = np.linspace(0.3, np.pi - 0.3, 9)
        write_csv(path, ["alpha", "rho"], [(float(a), float(0.2)) for a in alphas])
        sidecar = tmp_path / "rho.json"
        sidecar.write_text(json.dumps({"config": {"a": 0.01, "s": 0.1}}))
        meta = render("rho_sweep", str(path), str(tmp_path / "r.png"),
                      sidecar_path=str(sidecar))
        edge = float(np.arcsin(0.1))
        assert meta["geometry_edges"] == pytest.approx([edge, np.pi - edge])


class TestIdempotence:
    def test_re_render_identical(self, field_csv, tmp_path):
        out1 = str(tmp_path / "a.png")
        out2 = str(tmp_path / "b.png")
        render("field", field_csv, out1)
        render("field", field_csv, out2)
        assert np.array_equal(imread(out1), imread(out2))


@pytest.fixture(scope="module")
def pipeline_outputs(tmp_path_factory):
    """Drive the primary CLI's repro pipelines at desk scale."""
    if shutil.which("wedgewh") is None:
        pytest.skip("wedgewh CLI not installed")
    root = tmp_path_factory.mktemp("pipeline")
    small = {
        "M": 24, "lambda_M": 30, "rho_M": 16, "j_max": 12,
        "rho_alphas": [0.9, 1.2, 1.5],
        "aaa_n_samples": 1024, "aaa_max_degree": 120,
        "oracle_n_per_face": 4,
        "grid": {"x0": -0.6, "x1": 0.6, "y0": -0.6, "y1": 0.6,
                 "nx": 15, "ny": 15, "include_incident": False},
    }
    cfg = root / "overrides.json"
    cfg.write_text(json.dumps(small))

    def run(*args):
        proc = subprocess.run(["wedgewh", *args], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return proc

    for fig in ("fig3", "fig4", "fig5", "fig8", "fig10"):
        run("repro", fig, "--config", str(cfg), "--out", str(root / fig))
    full = dict(small, k=2.0, s=1.0, a=0.05, alpha=1.3, theta_inc=0.4)
    fcfg = root / "cfg.json"
    fcfg.write_text(json.dumps(full))
    run("factor", "--config", str(fcfg), "--out", str(root / "factor"))
    return root


class TestPipelineFromPrimary:
    """End-to-end: repro outputs render to every figure kind."""

    @pytest.mark.parametrize("kind,rel_in,rel_sidecar", [
        ("field", "fig3/fig3_field.csv", "fig3/fig3.json"),
        ("convergence", "fig5/fig5_convergence.csv", None),
        ("convergence", "fig8/fig8_rates.csv", None),
        ("rho_sweep", "fig4/fig4_rho.csv", "fig4/fig4.json"),
        ("lambda_plane", "fig10/fig10_lambda.csv", None),
        ("phase_portrait", "factor/factor.json", None),
        ("reciprocal_defect", "factor/factor.json", None),
    ])
    def test_kind_renders(self, pipeline_outputs, tmp_path, kind, rel_in, rel_sidecar):
        out = str(tmp_path / f"{kind}_{rel_in.replace('/', '_')}.png")
        meta = render(kind, str(pipeline_outputs / rel_in), out,
                      sidecar_path=str(pipeline_outputs / rel_sidecar) if rel_sidecar else None)
        assert meta["kind"] == kind
        assert imread(out).size > 0

    def test_cli_entrypoint(self, pipeline_outputs, tmp_path):
        out = str(tmp_path / "cli.png")
        proc = subprocess.run(
            [sys.executable, "-m", "whplots.cli", "lambda_plane",
             "--in", str(pipeline_outputs / "fig10/fig10_lambda.csv"), "--out", out],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout)["kind"] == "lambda_plane"
