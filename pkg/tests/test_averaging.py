import numpy as np
import pytest

from finsler_lab import AveragedMetricField, SphericalQuadratureRule, averaged_metric, recover_f, sigma
from finsler_lab.averaging import FRecoveryResult, pointwise_f_consistency
from finsler_lab.connection import assemble_compatible
from finsler_lab.kernel import cross_product
from finsler_lab.metrics import (
    ChartError,
    EuclideanMetric,
    LeftInvariantSU2Metric,
    QuarticMetric,
    RandersMetric,
    RiemannianMetric,
    TrifocalMetric,
    make_metric,
)

SMALL = SphericalQuadratureRule(16, 32)
# f at the identity of SU(2) for the quartic(0.1) Lie-algebra norm; by octahedral
# symmetry gamma(0) = kappa I and the Cartan connection gives f = -2 / sqrt(kappa)
SU2_F = -0.5436420644


def test_riemannian_average_is_4pi_times_input(rng):
    a = rng.normal(size=(3, 3))
    A = a @ a.T + np.eye(3)
    m = RiemannianMetric(lambda p: (1 + p @ p) * A)
    p = np.array([0.2, -0.3, 0.1])
    np.testing.assert_allclose(averaged_metric(m, p), 4 * np.pi * m.a(p), rtol=1e-9)


def test_euclidean_scale():
    np.testing.assert_allclose(averaged_metric(EuclideanMetric(3.0), np.zeros(3)), 36 * np.pi * np.eye(3), rtol=1e-10, atol=1e-9)


def test_octahedral_norm_averages_to_multiple_of_identity():
    g = averaged_metric(QuarticMetric(0.5), np.zeros(3))
    np.testing.assert_allclose(g, g[0, 0] * np.eye(3), atol=1e-9 * g[0, 0])
    assert g[0, 0] != pytest.approx(4 * np.pi, rel=1e-3)


def test_refinement_convergence():
    m = TrifocalMetric()
    rule = SphericalQuadratureRule()
    g1 = averaged_metric(m, np.zeros(3), rule)
    g2 = averaged_metric(m, np.zeros(3), rule.refined())
    assert np.max(np.abs(g1 - g2)) / np.max(np.abs(g2)) < 1e-6


def test_averaged_field_cache():
    gamma = AveragedMetricField(QuarticMetric(0.1), SMALL)
    a = gamma([0.1, 0.2, 0.3])
    a[0, 0] = -1.0  # callers get copies
    b = gamma([0.1, 0.2, 0.3 + 1e-15])
    assert gamma.cache_size == 1
    assert b[0, 0] > 0


def test_averaged_field_rejects_points_outside():
    gamma = AveragedMetricField(QuarticMetric(0.1, lo=(-0.5,) * 3, hi=(0.5,) * 3), SMALL)
    with pytest.raises(ChartError):
        gamma([0.7, 0.0, 0.0])


@pytest.mark.parametrize(
    "metric",
    [QuarticMetric(0.1), QuarticMetric(2.0), RandersMetric((0.2, 0.0, 0.1)), TrifocalMetric()],
    ids=["quartic", "quartic-strong", "randers", "trifocal"],
)
def test_locally_minkowski_gives_zero_f(metric):
    res = recover_f(metric, np.array([0.1, -0.2, 0.05]), SMALL)
    assert not res.degenerate
    assert abs(res.f) < 1e-10
    assert res.consistency < 1e-10


@pytest.mark.parametrize("name", ["euclidean", "riemannian-conformal", "round-s3"])
def test_riemannian_is_degenerate(name):
    params = {"log_gradient": [0.3, -0.2, 0.1]} if name == "riemannian-conformal" else {}
    res = recover_f(make_metric(name, **params), np.array([0.1, 0.1, -0.1]), SMALL)
    assert res.degenerate and res.f is None
    assert res.sigma_relative < 1e-12
    # the horizontal derivative of E vanishes for the Levi-Civita connection
    assert res.consistency < 1e-6


def test_su2_f_value_and_scaling():
    m = LeftInvariantSU2Metric(QuarticMetric(0.1))
    res = recover_f(m, np.zeros(3))
    assert res.f == pytest.approx(SU2_F, rel=1e-8)
    kappa = averaged_metric(m, np.zeros(3))[0, 0]
    assert res.f == pytest.approx(-2 / np.sqrt(kappa), rel=1e-8)
    # F -> lam F: gamma -> lam^2 gamma and the cross product -> lam x, so f -> f / lam
    m2 = LeftInvariantSU2Metric(QuarticMetric(0.1), scale=2.0)
    assert recover_f(m2, np.zeros(3)).f == pytest.approx(SU2_F / 2, rel=1e-8)


def test_su2_connection_invariant_under_scaling():
    p = np.array([0.05, -0.02, 0.03])
    conns = []
    for lam in (1.0, 3.0):
        m = LeftInvariantSU2Metric(QuarticMetric(0.1), scale=lam)
        gamma = AveragedMetricField(m, SMALL)
        conns.append(assemble_compatible(gamma, recover_f(m, p, SMALL, gamma=gamma).f).christoffel(p))
    np.testing.assert_allclose(conns[0], conns[1], atol=1e-9)


def test_su2_f_is_constant_across_chart(su2_metric):
    fs = [recover_f(su2_metric, p, SMALL).f for p in ([0.2, 0, 0], [0, -0.25, 0.1], [-0.15, 0.1, 0.2])]
    np.testing.assert_allclose(fs, SU2_F, rtol=1e-6)


def test_sigma_matches_denominator():
    m = LeftInvariantSU2Metric(QuarticMetric(0.1))
    res = recover_f(m, np.zeros(3), SMALL)
    assert sigma(m, np.zeros(3), SMALL) == pytest.approx(res.denominator, rel=1e-12)


def test_negative_control_breaks_consistency():
    m = QuarticMetric(0.1, eps_gradient=(0.5, 0.0, 0.0))
    p = np.array([0.1, 0.0, 0.0])
    c = pointwise_f_consistency(m, p, rule=SMALL)
    assert c > 1e-2
    assert pointwise_f_consistency(m, p, f=0.0, rule=SMALL) >= c * 0.5


def test_stencil_leaving_chart_is_reported():
    m = QuarticMetric(0.1, lo=(-0.5,) * 3, hi=(0.5,) * 3)
    with pytest.raises(ChartError, match="stencil"):
        recover_f(m, np.array([0.5, 0.0, 0.0]), SMALL)


def test_result_json_keys():
    res = recover_f(QuarticMetric(0.1), np.zeros(3), SMALL)
    assert isinstance(res, FRecoveryResult)
    assert set(res.to_json()) == {"f", "numerator", "denominator", "degenerate", "n_theta", "n_phi"}
    assert res.to_json()["n_theta"] == 16


def test_half_cross_field_direction():
    # V_i E = dE(w_i) with w_i = e_i x v / 2; for the Euclidean norm dE = v and so V_i E = 0
    g = np.eye(3)
    v = np.array([0.6, 0.8, 0.0])
    for i in range(3):
        w = 0.5 * cross_product(g, np.eye(3)[i], v)
        assert v @ w == pytest.approx(0.0, abs=1e-15)
