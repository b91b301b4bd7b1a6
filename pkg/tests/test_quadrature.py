import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from finsler_lab.metrics import QuarticMetric, RiemannianMetric, TrifocalMetric, riemann_finsler_metric
from finsler_lab.quadrature import (
    SphericalQuadratureRule,
    dump_nodes_csv,
    indicatrix_area,
    integrate_over_indicatrix,
    mu_density,
    sample_indicatrix,
)


def test_weights_sum_to_sphere_area():
    for rule in (SphericalQuadratureRule(), SphericalQuadratureRule(5, 7)):
        u, w = rule.nodes()
        assert w.sum() == pytest.approx(4 * np.pi, rel=1e-14)
        np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0, rtol=1e-15)
        assert len(u) == rule.size


@pytest.mark.parametrize(
    "powers,exact",
    [((2, 0, 0), 4 * np.pi / 3), ((0, 0, 4), 4 * np.pi / 5), ((2, 2, 0), 4 * np.pi / 15), ((2, 2, 2), 4 * np.pi / 105), ((1, 0, 0), 0.0)],
)
def test_polynomial_moments(powers, exact):
    u, w = SphericalQuadratureRule(8, 16).nodes()
    vals = np.prod(u ** np.array(powers), axis=1)
    assert w @ vals == pytest.approx(exact, abs=1e-14)


def test_invalid_rule():
    with pytest.raises(ValueError):
        SphericalQuadratureRule(0, 4)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, (3, 3), elements=st.floats(-0.8, 0.8)), st.floats(0.1, 10.0))
def test_riemannian_indicatrix_area_is_4pi(a, scale):
    # moderate anisotropy keeps the spectral quadrature error far below the tolerance
    A = scale * (a @ a.T + np.eye(3))
    m = RiemannianMetric(lambda p: A)
    assert indicatrix_area(m, np.zeros(3), SphericalQuadratureRule(24, 48)) == pytest.approx(4 * np.pi, rel=1e-8)


def test_density_matches_parametrised_volume_form():
    # mu(d_theta v, d_phi v) must equal J sin(theta) for v = u(theta, phi) / F(u)
    m = TrifocalMetric()
    p = np.zeros(3)
    theta, phi, h = 1.1, 0.7, 1e-5

    def v_of(t, f):
        u = np.array([np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t)])
        return u / m.F(p, u)

    v = v_of(theta, phi)
    t1 = (v_of(theta + h, phi) - v_of(theta - h, phi)) / (2 * h)
    t2 = (v_of(theta, phi + h) - v_of(theta, phi - h)) / (2 * h)
    u = v / np.linalg.norm(v)
    J = np.sqrt(np.linalg.det(riemann_finsler_metric(m, p, u))) / m.F(p, u) ** 3
    assert mu_density(m, p, v, t1, t2) == pytest.approx(J * np.sin(theta), rel=1e-8)


def test_integrate_vector_values_and_rotation_independence():
    m = QuarticMetric(0.3)
    p = np.zeros(3)
    R, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(3, 3)))
    a = integrate_over_indicatrix(m, p, lambda v: v[:, :, None] * v[:, None, :])
    b = integrate_over_indicatrix(m, p, lambda v: v[:, :, None] * v[:, None, :], SphericalQuadratureRule(rotation=tuple(map(tuple, R))))
    assert a.shape == (3, 3)
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-9)
    # odd moments vanish for a reversible norm
    assert np.max(np.abs(integrate_over_indicatrix(m, p, lambda v: v))) < 1e-10


def test_sample_indicatrix_points_are_on_indicatrix():
    m = QuarticMetric(0.2)
    s = sample_indicatrix(m, np.zeros(3), SphericalQuadratureRule(6, 12))
    np.testing.assert_allclose(m.F(np.zeros(3), s.vectors), 1.0, rtol=1e-14)
    assert np.all(s.density > 0)


def test_bad_node_is_named():
    class Broken(QuarticMetric):
        def _F(self, p, y):
            out = super()._F(p, y)
            out[3] = np.nan
            return out

    with pytest.raises(FloatingPointError, match="node 3"):
        sample_indicatrix(Broken(0.1), np.zeros(3), SphericalQuadratureRule(4, 4))


def test_dump_nodes_csv(tmp_path):
    s = sample_indicatrix(QuarticMetric(0.1), np.zeros(3), SphericalQuadratureRule(2, 3))
    path = tmp_path / "nodes.csv"
    dump_nodes_csv(s, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("u1,u2,u3") and len(lines) == 7
