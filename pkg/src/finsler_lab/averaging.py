"""Averaged Riemannian metric and recovery of the torsion scalar ``f``.

For a compatible connection ``nabla* + (f/2) X x Y`` the horizontal lifts
of the Levi-Civita connection of the averaged metric satisfy
``X_i^{h*} E = f V_i E`` on every indicatrix, where
``V_i = (1/2) e_i x C``. Integrating against the induced volume form
gives ``f`` as a ratio of two quadratures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connection import christoffel_levi_civita
from .fields import CachedMetricField, MetricField
from .kernel import DiffScheme, NotPositiveDefiniteError, cross_tensor, partial_derivatives, spd_check
from .metrics import FinslerMetric, riemann_finsler_metric
from .quadrature import IndicatrixSamples, SphericalQuadratureRule, sample_indicatrix

RIEMANNIAN_THRESHOLD = 1e-8


def averaged_metric(
    metric: FinslerMetric,
    p,
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
) -> np.ndarray:
    """``gamma_ij(p) = int g_ij mu`` over the indicatrix at ``p``."""
    samples = sample_indicatrix(metric, p, rule, scheme)
    return _gamma_from_samples(samples)


def _gamma_from_samples(samples: IndicatrixSamples) -> np.ndarray:
    gam = samples.integrate(samples.metric)
    gam = 0.5 * (gam + gam.T)
    ok, lam = spd_check(gam)
    if not ok:
        raise NotPositiveDefiniteError(
            f"averaged metric at {samples.point.tolist()} is not positive definite "
            f"(smallest eigenvalue {lam:.3e}); refine the quadrature or check the metric",
            lam,
        )
    return gam


class AveragedMetricField(CachedMetricField):
    """``p -> gamma(p)`` with memoisation on finite-difference lattice points."""

    provenance = "averaged"

    def __init__(self, metric: FinslerMetric, rule: SphericalQuadratureRule | None = None, scheme: DiffScheme | None = None):
        super().__init__(metric.lo, metric.hi)
        self.finsler = metric
        self.rule = rule or SphericalQuadratureRule()
        self.scheme = scheme or DiffScheme()

    def _compute(self, p):
        return averaged_metric(self.finsler, p, self.rule, self.scheme)


def _half_cross_fields(gamma_p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``w[..., i, k]``: components of ``(1/2) e_i x v`` for the metric ``gamma_p``."""
    C = cross_tensor(gamma_p)
    return 0.5 * np.einsum("kij,...j->...ik", C, v)


def v_field_E(
    metric: FinslerMetric,
    gamma_p,
    p,
    v,
    scheme: DiffScheme | None = None,
    g: np.ndarray | None = None,
) -> np.ndarray:
    """``(V_1 E, V_2 E, V_3 E)`` at ``v``, shape ``(..., 3)``.

    Uses ``dE/dy = g(v) v`` so only the fiber Hessian is differenced.
    """
    v = np.asarray(v, dtype=float)
    if g is None:
        g = riemann_finsler_metric(metric, p, v, scheme)
    dE = np.einsum("...jk,...k->...j", g, v)
    w = _half_cross_fields(np.asarray(gamma_p, dtype=float), v)
    return np.einsum("...j,...ij->...i", dE, w)


def horizontal_E(
    metric: FinslerMetric,
    gamma: MetricField,
    p,
    v,
    scheme: DiffScheme | None = None,
    g: np.ndarray | None = None,
    christoffel: np.ndarray | None = None,
) -> np.ndarray:
    """``X_i^{h*} E = dE/dx^i - v^j Gamma*^l_ij dE/dy^l`` at ``(p, v)``."""
    scheme = scheme or DiffScheme()
    p = metric.check_point(p)
    v = np.asarray(v, dtype=float)
    if g is None:
        g = riemann_finsler_metric(metric, p, v, scheme)
    if christoffel is None:
        christoffel = christoffel_levi_civita(gamma, p, scheme)
    for off in (-2 * scheme.h_base, 2 * scheme.h_base):
        for i in range(3):
            q = p.copy()
            q[i] += off
            metric.check_point(q)
    dEdx = np.moveaxis(partial_derivatives(lambda q: metric.energy(q, v), p, scheme.h_base, scheme.order), 0, -1)
    dE = np.einsum("...jk,...k->...j", g, v)
    return dEdx - np.einsum("...j,lij,...l->...i", v, christoffel, dE)


@dataclass
class FRecoveryResult:
    f: float | None
    numerator: float
    denominator: float
    degenerate: bool
    n_theta: int
    n_phi: int
    sigma_relative: float
    consistency: float  # max_i,a |X_i^{h*}E - f V_i E|, or max |X^{h*}E| when degenerate
    point: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "f": self.f,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "degenerate": self.degenerate,
            "n_theta": self.n_theta,
            "n_phi": self.n_phi,
        }


@dataclass
class _Integrands:
    samples: IndicatrixSamples
    VE: np.ndarray
    XE: np.ndarray
    sigma_ref_density: np.ndarray


def _integrands(metric, p, rule, scheme, gamma) -> _Integrands:
    samples = sample_indicatrix(metric, p, rule, scheme)
    gp = gamma(p)
    v, g = samples.vectors, samples.metric
    VE = v_field_E(metric, gp, p, v, scheme, g=g)
    XE = horizontal_E(metric, gamma, p, v, scheme, g=g)
    # Cauchy-Schwarz bound |V_i E| <= |dE|_{gamma^-1} |w_i|_gamma gives a scale for sigma
    dE = np.einsum("njk,nk->nj", g, v)
    w = _half_cross_fields(gp, v)
    dE_norm2 = np.einsum("nj,jk,nk->n", dE, np.linalg.inv(gp), dE)
    w_norm2 = np.einsum("nik,kl,nil->n", w, gp, w)
    return _Integrands(samples, VE, XE, dE_norm2 * w_norm2)


def sigma(
    metric: FinslerMetric,
    p,
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
    gamma_p=None,
) -> float:
    """``sum_i int (V_i E)^2 mu`` at ``p``."""
    samples = sample_indicatrix(metric, p, rule, scheme)
    if gamma_p is None:
        gamma_p = _gamma_from_samples(samples)
    VE = v_field_E(metric, gamma_p, p, samples.vectors, scheme, g=samples.metric)
    return float(samples.integrate(np.sum(VE**2, axis=-1)))


def recover_f(
    metric: FinslerMetric,
    p,
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
    gamma: MetricField | None = None,
    threshold: float = RIEMANNIAN_THRESHOLD,
) -> FRecoveryResult:
    """Torsion scalar ``f(p) = int V E mu / sigma(p)``.

    ``V E = sum_i (V_i E)(X_i^{h*} E)``. When ``sigma`` falls below
    ``threshold`` times its Cauchy-Schwarz scale the indicatrix is a sphere
    of the averaged metric; the result is then flagged degenerate and
    carries no ``f``.
    """
    rule = rule or SphericalQuadratureRule()
    scheme = scheme or DiffScheme()
    if gamma is None:
        gamma = AveragedMetricField(metric, rule, scheme)
    p = np.asarray(p, dtype=float)
    it = _integrands(metric, p, rule, scheme, gamma)
    num = float(it.samples.integrate(np.sum(it.VE * it.XE, axis=-1)))
    den = float(it.samples.integrate(np.sum(it.VE**2, axis=-1)))
    ref = float(it.samples.integrate(it.sigma_ref_density))
    rel = den / ref if ref > 0 else 0.0
    degenerate = rel < threshold
    if degenerate:
        f = None
        consistency = float(np.max(np.abs(it.XE)))
    else:
        f = num / den
        consistency = float(np.max(np.abs(it.XE - f * it.VE)))
    return FRecoveryResult(f, num, den, degenerate, rule.n_theta, rule.n_phi, rel, consistency, p.tolist())


def pointwise_f_consistency(
    metric: FinslerMetric,
    p,
    f: float | None = None,
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
    gamma: MetricField | None = None,
) -> float:
    """Max over indicatrix nodes of ``|X_i^{h*} E - f V_i E|``.

    With ``f=None`` the recovered value at ``p`` is used (or ``0`` where the
    indicatrix is a sphere of the averaged metric, since ``V_i E`` vanishes).
    """
    rule = rule or SphericalQuadratureRule()
    scheme = scheme or DiffScheme()
    if gamma is None:
        gamma = AveragedMetricField(metric, rule, scheme)
    if f is None:
        return recover_f(metric, p, rule, scheme, gamma).consistency
    it = _integrands(metric, np.asarray(p, dtype=float), rule, scheme, gamma)
    return float(np.max(np.abs(it.XE - f * it.VE)))
