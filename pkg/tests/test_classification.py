import numpy as np

from finsler_lab import SphericalQuadratureRule, Verdict, classify
from finsler_lab.classification import Tolerances
from finsler_lab.killing import rotation_field
from finsler_lab.metrics import EuclideanMetric, QuarticMetric, RandersMetric, make_metric

SMALL = SphericalQuadratureRule(16, 32)
PTS = np.array([[0.0, 0.0, 0.0], [0.2, -0.1, 0.1]])


def test_riemannian_branch():
    rep = classify(make_metric("round-s3"), PTS, SMALL)
    assert rep.verdict is Verdict.RIEMANNIAN
    assert rep.f_values == []


def test_classical_berwald_branch():
    for m in (QuarticMetric(0.1), RandersMetric((0.1, 0.2, 0.0))):
        rep = classify(m, PTS, SMALL)
        assert rep.verdict is Verdict.CLASSICAL_BERWALD_FLAT, rep.reasons
        assert rep.summary["flat"]
        assert all(abs(f) < 1e-10 for f in rep.f_values)


def test_negative_control_is_inconsistent():
    rep = classify(QuarticMetric(0.1, eps_gradient=(0.5, 0.0, 0.0)), [[0.1, 0.0, 0.0]], SMALL)
    assert rep.verdict is Verdict.INCONSISTENT
    assert rep.summary["max_consistency"] > 1e-2
    assert "compatibility residual" in rep.reasons[0]


def test_consistency_tolerance_is_respected():
    m = QuarticMetric(0.1, eps_gradient=(0.5, 0.0, 0.0))
    rep = classify(m, [[0.1, 0.0, 0.0]], SMALL, tol=Tolerances(consistency=1.0))
    assert rep.verdict is not Verdict.INCONSISTENT


def test_killing_evidence_is_attached():
    rep = classify(EuclideanMetric(), PTS, SMALL, beta=rotation_field())
    assert rep.verdict is Verdict.RIEMANNIAN
    rep = classify(QuarticMetric(0.1), PTS, SMALL, beta=rotation_field())
    at_axis, off_axis = (r.killing for r in rep.records)
    assert off_axis["lie_derivative"] < 1e-8
    assert at_axis["extraction_error"] == "nonvanishing"
    assert off_axis["extraction_error"] == "constant-length"


def test_report_json_shape():
    body = classify(QuarticMetric(0.1), PTS[:1], SMALL).to_json()
    assert set(body) == {"verdict", "reasons", "summary", "points"}
    assert body["verdict"] == "classical-berwald-zero-curvature"
    rec = body["points"][0]
    assert {"point", "gamma", "sigma", "f", "degenerate", "consistency", "curvature_norm"} <= set(rec)
