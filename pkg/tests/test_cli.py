import json
import subprocess
import sys

import numpy as np
import pytest

from finsler_lab.cli import main
from finsler_lab.metrics import QuarticMetric
from finsler_lab.report import dumps, read_obj, write_points_csv

QUARTIC = """
manifold: {metric: quartic, params: {eps: 0.2}}
sample: {lattice: [1, 1, 2]}
quadrature: {n_theta: 8, n_phi: 16}
"""


@pytest.fixture
def quartic_cfg(tmp_path):
    path = tmp_path / "quartic.yaml"
    path.write_text(QUARTIC)
    return path


def test_analyze_writes_report_and_csv(quartic_cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["analyze", "--config", str(quartic_cfg), "--out", str(out)]) == 0
    rep = json.loads((out / "analyze_report.json").read_text())
    assert rep["schema_version"] == 1 and rep["command"] == "analyze"
    assert rep["verdict"] == "classical-berwald-zero-curvature"
    assert rep["config"]["manifold"]["chart"]["lo"] == [-1.0, -1.0, -1.0]
    rows = (out / "analyze_points.csv").read_text().splitlines()
    assert rows[0].startswith("p1,p2,p3,sigma") and len(rows) == 3


def test_reports_are_byte_identical(quartic_cfg, tmp_path):
    for name in ("a", "b"):
        assert main(["classify", "--config", str(quartic_cfg), "--out", str(tmp_path / name), "--seed", "3"]) == 0
    assert (tmp_path / "a" / "classify_verdict.json").read_bytes() == (tmp_path / "b" / "classify_verdict.json").read_bytes()


def test_overrides_are_echoed(quartic_cfg, tmp_path):
    main(["classify", "--config", str(quartic_cfg), "--out", str(tmp_path), "--n-theta", "6", "--n-phi", "10"])
    cfg = json.loads((tmp_path / "classify_verdict.json").read_text())["config"]
    assert cfg["quadrature"] == {"n_theta": 6, "n_phi": 10}


def test_negative_control_exits_2(tmp_path):
    path = tmp_path / "neg.yaml"
    path.write_text(
        "manifold: {metric: quartic, params: {eps: 0.1, eps_gradient: [0.5, 0, 0]}}\n"
        "sample: {lattice: [1, 1, 1], lo: [0.1, 0, 0], hi: [0.1, 0, 0]}\n"
        "quadrature: {n_theta: 16, n_phi: 32}\n"
    )
    assert main(["classify", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert json.loads((tmp_path / "classify_verdict.json").read_text())["verdict"] == "inconsistent"


def test_usage_and_config_errors_exit_1(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "--config", "x"])
    assert exc.value.code == 1
    assert main(["analyze", "--config", str(tmp_path / "missing.yaml")]) == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("manifold: {metric: nope}\n")
    assert main(["analyze", "--config", str(bad)]) == 1
    assert "config error: manifold.metric" in capsys.readouterr().err


def test_export_indicatrix_obj(quartic_cfg, tmp_path):
    assert main(["export-indicatrix", "--config", str(quartic_cfg), "--out", str(tmp_path), "--point", "0.1,0,0"]) == 0
    verts, faces = read_obj(tmp_path / "indicatrix.obj")
    assert verts.shape == (8 * 16 + 2, 3)
    assert len(faces) == 2 * 16 * 8
    np.testing.assert_allclose(QuarticMetric(0.2).F(np.zeros(3), verts), 1.0, rtol=1e-13)
    # outward orientation: the signed volume of the closed mesh is positive
    a, b, c = (verts[faces[:, k]] for k in range(3))
    assert np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6 > 0
    assert main(["export-indicatrix", "--config", str(quartic_cfg), "--out", str(tmp_path), "--point", "1,2"]) == 1
    assert main(["export-indicatrix", "--config", str(quartic_cfg), "--out", str(tmp_path), "--point", "5,0,0"]) == 1


def test_transport_and_verify_connection(quartic_cfg, tmp_path):
    text = QUARTIC + "transport: {curve: segment, start: [0, 0, 0], end: [0.3, 0.1, 0], vector: [0, 1, 0], steps: 2}\n"
    quartic_cfg.write_text(text)
    assert main(["transport", "--config", str(quartic_cfg), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "transport.json").read_text())
    assert rep["connection"]["f"] == pytest.approx(0.0, abs=1e-10)
    assert rep["drift"] < 1e-9
    assert main(["verify-connection", "--config", str(quartic_cfg), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "verify_connection.json").read_text())
    assert rep["passed"] and rep["max_compatibility_residual"] < 1e-8
    assert len(rep["loops"]) == 2


def test_transport_segment_needs_endpoints(quartic_cfg, tmp_path):
    quartic_cfg.write_text(QUARTIC + "transport: {curve: segment}\n")
    assert main(["transport", "--config", str(quartic_cfg), "--out", str(tmp_path)]) == 1


def test_module_entry_point_and_log_level(quartic_cfg, tmp_path):
    env = {"FINSLER_LAB_LOG_LEVEL": "info", "PATH": ""}
    proc = subprocess.run(
        [sys.executable, "-m", "finsler_lab.cli", "classify", "--config", str(quartic_cfg), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0, proc.stderr
    assert "verdict classical-berwald-zero-curvature" in proc.stderr


def test_report_helpers(tmp_path):
    text = dumps({"b": np.float64(1.5), "a": np.arange(2), "c": float("nan"), "d": np.bool_(True)})
    assert json.loads(text) == {"a": [0, 1], "b": 1.5, "c": "nan", "d": True}
    path = write_points_csv([{"point": [1.0, 2.0, 3.0], "f": None}], tmp_path / "p.csv", ["p1", "p2", "p3", "f"])
    assert path.read_text().splitlines() == ["p1,p2,p3,f", "1.0,2.0,3.0,"]
