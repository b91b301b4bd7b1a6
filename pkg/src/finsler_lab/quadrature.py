"""Integration over indicatrix surfaces against the induced volume form.

The indicatrix at ``p`` is parametrised radially from the unit sphere,
``u -> v(u) = u / F(p, u)``. Pulling the induced volume form back along
this map gives the density ``sqrt(det g(u)) / F(p, u)**3`` with respect to
the round area element: the radial part of ``dv`` drops out of
``det[v | dv t1 | dv t2]`` because ``v`` is parallel to ``u``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernel import DiffScheme
from .metrics import FinslerMetric, riemann_finsler_metric


@dataclass(frozen=True)
class SphericalQuadratureRule:
    """Gauss-Legendre in ``cos(theta)`` times the midpoint rule in ``phi``.

    ``rotation`` (an orthogonal matrix) turns the whole node set; it is
    used to test independence from the parametrisation.
    """

    n_theta: int = 32
    n_phi: int = 64
    rotation: tuple | None = None

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 1:
            raise ValueError("quadrature counts must be positive")

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit directions ``(n, 3)`` and weights ``(n,)`` summing to ``4 pi``."""
        return _nodes(self.n_theta, self.n_phi, self.rotation)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """``(cos_theta, phi)`` node coordinates, for meshing."""
        x, _ = np.polynomial.legendre.leggauss(self.n_theta)
        phi = 2.0 * np.pi * (np.arange(self.n_phi) + 0.5) / self.n_phi
        return x, phi

    def refined(self) -> "SphericalQuadratureRule":
        return SphericalQuadratureRule(2 * self.n_theta, 2 * self.n_phi, self.rotation)


_NODE_CACHE: dict = {}


def _nodes(n_theta, n_phi, rotation):
    key = (n_theta, n_phi, rotation)
    if key not in _NODE_CACHE:
        x, wx = np.polynomial.legendre.leggauss(n_theta)
        phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
        ct, ph = np.meshgrid(x, phi, indexing="ij")
        st = np.sqrt(1.0 - ct**2)
        u = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1).reshape(-1, 3)
        w = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)
        if rotation is not None:
            u = u @ np.asarray(rotation, dtype=float).T
        u.setflags(write=False)
        w.setflags(write=False)
        _NODE_CACHE[key] = (u, w)
    return _NODE_CACHE[key]


@dataclass
class IndicatrixSamples:
    """Quadrature nodes mapped onto the indicatrix at one base point."""

    point: np.ndarray
    directions: np.ndarray  # u_a, unit
    vectors: np.ndarray  # v_a = u_a / F(p, u_a), F(p, v_a) = 1
    metric: np.ndarray  # g(v_a), shape (n, 3, 3)
    density: np.ndarray  # induced volume density J_a
    weights: np.ndarray  # round-sphere weights w_a

    @property
    def measure(self) -> np.ndarray:
        """Combined weights ``w_a J_a`` so that sum(measure * phi) integrates phi."""
        return self.weights * self.density

    def integrate(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        m = self.measure.reshape((-1,) + (1,) * (values.ndim - 1))
        return np.sum(m * values, axis=0)


def indicatrix_point(metric: FinslerMetric, p, u) -> np.ndarray:
    """Radial projection of ``u`` onto ``F(p, .) = 1`` (exact by homogeneity)."""
    u = np.asarray(u, dtype=float)
    return u / metric.F(p, u)[..., None]


def mu_density(metric: FinslerMetric, p, v, t1, t2, scheme: DiffScheme | None = None) -> np.ndarray:
    """Induced volume form ``mu_v(t1, t2) = sqrt(det g(v)) det[v | t1 | t2]``.

    Assumes ``F(p, v) = 1``; then the contraction of the fiber volume form
    with the Liouville field over ``F`` reduces to this determinant.
    """
    g = riemann_finsler_metric(metric, p, v, scheme)
    stacked = np.stack(np.broadcast_arrays(np.asarray(v, float), np.asarray(t1, float), np.asarray(t2, float)), axis=-1)
    return np.sqrt(np.linalg.det(g)) * np.linalg.det(stacked)


def sample_indicatrix(
    metric: FinslerMetric,
    p,
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
) -> IndicatrixSamples:
    rule = rule or SphericalQuadratureRule()
    p = np.asarray(p, dtype=float)
    u, w = rule.nodes()
    Fu = metric.F(p, u)
    if not np.all(np.isfinite(Fu)) or np.any(Fu <= 0):
        bad = int(np.flatnonzero(~(np.isfinite(Fu) & (Fu > 0)))[0])
        raise FloatingPointError(f"F is not positive at node {bad} (direction {u[bad].tolist()}) of point {p.tolist()}")
    g = riemann_finsler_metric(metric, p, u, scheme)
    detg = np.linalg.det(g)
    if np.any(detg <= 0):
        bad = int(np.flatnonzero(detg <= 0)[0])
        raise FloatingPointError(f"Riemann-Finsler metric degenerate at node {bad} (direction {u[bad].tolist()}) of point {p.tolist()}")
    v = u / Fu[:, None]
    J = np.sqrt(detg) / Fu**3
    return IndicatrixSamples(p, u, v, g, J, np.asarray(w))


def integrate_over_indicatrix(
    metric: FinslerMetric,
    p,
    phi: Callable[[np.ndarray], np.ndarray],
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
) -> np.ndarray:
    """``sum_a w_a J_a phi(v_a)``; ``phi`` maps ``(n, 3)`` points to ``(n, ...)`` values."""
    samples = sample_indicatrix(metric, p, rule, scheme)
    return samples.integrate(phi(samples.vectors))


def indicatrix_area(metric: FinslerMetric, p, rule=None, scheme=None) -> float:
    return float(integrate_over_indicatrix(metric, p, lambda v: np.ones(len(v)), rule, scheme))


def dump_nodes_csv(samples: IndicatrixSamples, path) -> None:
    """Write one row per quadrature node, for debugging."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["u1", "u2", "u3", "v1", "v2", "v3", "weight", "density"])
        for u, v, w, j in zip(samples.directions, samples.vectors, samples.weights, samples.density):
            wr.writerow([repr(float(x)) for x in (*u, *v, w, j)])
