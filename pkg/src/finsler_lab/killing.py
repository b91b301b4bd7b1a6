"""Killing-field diagnostics for cross-product connections.

A unit section that is parallel for ``nabla = nabla* + (f/2) X x Y``
satisfies ``nabla*_X beta = -(f/2) X x beta``, so its Hesse form is
skew and it generates isometries of the averaged metric. Conversely the
skew Hesse form of a Killing field of constant length determines ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .connection import ConnectionField, christoffel_levi_civita
from .fields import MetricField
from .kernel import DiffScheme, cross_tensor, partial_derivatives
from .metrics import ConfigurationError, su2_chart_jacobian

VectorField = Callable[[np.ndarray], np.ndarray]


class PreconditionError(ValueError):
    """A Killing/constant-length precondition failed; ``check`` names it."""

    def __init__(self, check: str, value: float):
        super().__init__(f"precondition {check!r} failed (residual {value:.3e})")
        self.check = check
        self.value = value


def _dbeta(beta: VectorField, p, scheme) -> np.ndarray:
    """``D[i, k] = d_i beta^k``."""
    return partial_derivatives(lambda q: np.asarray(beta(q), dtype=float), p, scheme.h_base, scheme.order)


def lie_derivative_metric(beta: VectorField, gamma: MetricField, p, scheme: DiffScheme | None = None) -> np.ndarray:
    """``(L_beta g)_ij = beta^k d_k g_ij + g_kj d_i beta^k + g_ik d_j beta^k``."""
    scheme = scheme or DiffScheme()
    p = np.asarray(p, dtype=float)
    b = np.asarray(beta(p), dtype=float)
    g = gamma(p)
    dg = partial_derivatives(gamma, p, scheme.h_base, scheme.order)
    D = _dbeta(beta, p, scheme)
    L = np.einsum("k,kij->ij", b, dg) + np.einsum("kj,ik->ij", g, D) + np.einsum("ik,jk->ij", g, D)
    return 0.5 * (L + L.T)


def covariant_derivative(beta: VectorField, G: np.ndarray, p, scheme: DiffScheme) -> np.ndarray:
    """``M[k, i] = (nabla_{e_i} beta)^k = d_i beta^k + Gamma^k_ij beta^j``."""
    p = np.asarray(p, dtype=float)
    return _dbeta(beta, p, scheme).T + np.einsum("kij,j->ki", G, np.asarray(beta(p), dtype=float))


def covariant_constancy_residual(beta: VectorField, conn: ConnectionField, p, scheme: DiffScheme | None = None) -> np.ndarray:
    scheme = scheme or conn.scheme
    return covariant_derivative(beta, conn.christoffel(p), p, scheme)


def constant_length_residual(beta: VectorField, gamma: MetricField, p, scheme: DiffScheme | None = None) -> np.ndarray:
    """Gradient of ``gamma(beta, beta)`` at ``p``."""
    scheme = scheme or DiffScheme()

    def length2(q):
        b = np.asarray(beta(q), dtype=float)
        return b @ gamma(q) @ b

    return partial_derivatives(length2, p, scheme.h_base, scheme.order)


@dataclass
class KillingExtraction:
    f: float
    residual: float  # max |nabla* beta + (f/2) X x beta| after the fit
    lie_derivative: float
    length_gradient: float
    hesse_skew: float


def extract_f_from_killing(
    beta: VectorField,
    gamma: MetricField,
    p,
    scheme: DiffScheme | None = None,
    tol: float = 1e-5,
) -> KillingExtraction:
    """Least-squares ``f`` in ``nabla*_{e_i} beta = -(f/2) e_i x beta``.

    Before fitting, ``beta`` must be nonzero at ``p``, Killing, of constant
    length and have a skew Hesse form ``g(nabla*_X beta, Y)``, each to
    ``tol`` relative to
    ``|g| max(|beta|, |d beta|)`` (per unit coordinate length); otherwise
    :class:`PreconditionError` is raised.
    """
    scheme = scheme or DiffScheme()
    p = np.asarray(p, dtype=float)
    g = gamma(p)
    b = np.asarray(beta(p), dtype=float)
    # size of beta near p; its derivative keeps the scale meaningful where beta vanishes
    size = max(np.max(np.abs(b)), np.max(np.abs(_dbeta(beta, p, scheme))), 1e-300)
    scale = np.max(np.abs(g)) * size

    if np.max(np.abs(b)) <= tol * size:
        # a constant-length field vanishing at one point vanishes identically
        raise PreconditionError("nonvanishing", float(np.max(np.abs(b))))
    lie = float(np.max(np.abs(lie_derivative_metric(beta, gamma, p, scheme))))
    if lie > tol * scale:
        raise PreconditionError("killing", lie)
    length = float(np.max(np.abs(constant_length_residual(beta, gamma, p, scheme))))
    if length > tol * scale * size:
        raise PreconditionError("constant-length", length)
    B = covariant_derivative(beta, christoffel_levi_civita(gamma, p, scheme), p, scheme)
    H = np.einsum("jk,ki->ij", g, B)  # H[i, j] = g(nabla*_{e_i} beta, e_j)
    skew = float(np.max(np.abs(H + H.T)))
    if skew > tol * scale:
        raise PreconditionError("skew-hesse-form", skew)

    A = -0.5 * np.einsum("kij,j->ki", cross_tensor(g), b)  # -(1/2) e_i x beta
    denom = float(np.sum(A * A))
    f = float(np.sum(A * B) / denom) if denom > 0 else 0.0
    return KillingExtraction(f, float(np.max(np.abs(B - f * A))), lie, length, skew)


# --------------------------------------------------------------------------
# zoo


def constant_field(vector) -> VectorField:
    v = np.asarray(vector, dtype=float)
    return lambda p: v.copy()


def rotation_field(axis=(0.0, 0.0, 1.0)) -> VectorField:
    """``axis x p``; for the default axis this is ``(-p2, p1, 0)``."""
    a = np.asarray(axis, dtype=float)
    return lambda p: np.cross(a, np.asarray(p, dtype=float))


def linear_field(matrix) -> VectorField:
    M = np.asarray(matrix, dtype=float)
    return lambda p: M @ np.asarray(p, dtype=float)


def hopf_field(axis=(0.0, 0.0, 1.0), scale: float = 1.0) -> VectorField:
    """Left-invariant field on the SU(2) projection chart generated by ``axis``."""
    a = scale * np.asarray(axis, dtype=float)
    return lambda p: np.linalg.solve(su2_chart_jacobian(p), a)


def make_vector_field(name: str, **params) -> VectorField:
    builders = {"constant": constant_field, "rotation": rotation_field, "linear": linear_field, "hopf": hopf_field}
    if name not in builders:
        raise ConfigurationError(f"unknown vector field {name!r}; known: {', '.join(sorted(builders))}")
    try:
        return builders[name](**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for vector field {name!r}: {exc}") from None
