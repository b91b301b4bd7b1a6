"""Finsler metrics on a single chart and the zoo of concrete examples.

A metric is evaluated as ``metric.F(p, y)`` with a single base point ``p``
of shape ``(3,)`` and fiber vectors ``y`` of shape ``(..., 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .kernel import DiffScheme, hessian, gradient, spd_check


class ChartError(ValueError):
    """A base point falls outside the chart domain."""


class SingularPointError(ValueError):
    """Evaluation requested on the declared singular locus (the zero section)."""


class ConfigurationError(ValueError):
    """Metric parameters violate a construction precondition."""


_ZERO_TOL = 1e-300


def _as_y(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != 3:
        raise ValueError(f"fiber vectors must have a trailing axis of length 3, got {y.shape}")
    return y


class FinslerMetric:
    """Base class: a fundamental function ``F(p, y)`` on a box chart.

    Subclasses implement :meth:`_F`. ``locally_minkowski`` is a declaration
    used only for documentation and reporting.
    """

    name = "finsler"
    locally_minkowski = False

    def __init__(self, lo=(-1.0, -1.0, -1.0), hi=(1.0, 1.0, 1.0)):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def in_domain(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (3,):
            raise ValueError(f"base point must have shape (3,), got {p.shape}")
        if not self.in_domain(p):
            raise ChartError(f"point {p.tolist()} lies outside the chart box {self.lo.tolist()}..{self.hi.tolist()}")
        return p

    def F(self, p, y) -> np.ndarray:
        return self._F(np.asarray(p, dtype=float), _as_y(y))

    def _F(self, p: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def energy(self, p, y) -> np.ndarray:
        return 0.5 * self.F(p, y) ** 2

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def energy(metric: FinslerMetric, p, y) -> np.ndarray:
    """``E = F^2 / 2``; rejects the zero vector."""
    y = _as_y(y)
    if np.any(np.linalg.norm(y, axis=-1) <= _ZERO_TOL):
        raise SingularPointError("energy is not evaluated on the zero section")
    return metric.energy(p, y)


def riemann_finsler_metric(metric: FinslerMetric, p, y, scheme: DiffScheme | None = None) -> np.ndarray:
    """Fiber Hessian ``g_ij`` of the energy at ``(p, y)``.

    The Hessian is 0-homogeneous, so it is computed at ``y / |y|`` with an
    absolute fiber step. Batch axes of ``y`` are preserved.
    """
    scheme = scheme or DiffScheme()
    y = _as_y(y)
    norms = np.linalg.norm(y, axis=-1, keepdims=True)
    if np.any(norms <= _ZERO_TOL):
        raise SingularPointError("the Riemann-Finsler metric is undefined on the zero section")
    u = y / norms
    p = np.asarray(p, dtype=float)
    return hessian(lambda z: metric.energy(p, z), u, scheme.h_fiber, scheme.order)


def fiber_gradient(metric: FinslerMetric, p, y, scheme: DiffScheme | None = None) -> np.ndarray:
    """Finite-difference ``dF/dy`` (1-homogeneous F, so 0-homogeneous gradient)."""
    scheme = scheme or DiffScheme()
    y = _as_y(y)
    u = y / np.linalg.norm(y, axis=-1, keepdims=True)
    p = np.asarray(p, dtype=float)
    return gradient(lambda z: metric.F(p, z), u, scheme.h_fiber, scheme.order)


# --------------------------------------------------------------------------
# Riemannian inputs


class RiemannianMetric(FinslerMetric):
    """``F(p, y) = sqrt(a_p(y, y))`` for a symmetric positive-definite field ``a``."""

    name = "riemannian"

    def __init__(self, matrix_field: Callable[[np.ndarray], np.ndarray], lo=(-1.0,) * 3, hi=(1.0,) * 3):
        super().__init__(lo, hi)
        self.matrix_field = matrix_field

    def a(self, p) -> np.ndarray:
        return np.asarray(self.matrix_field(np.asarray(p, dtype=float)), dtype=float)

    def _F(self, p, y):
        return np.sqrt(np.einsum("...i,ij,...j->...", y, self.a(p), y))


class EuclideanMetric(RiemannianMetric):
    name = "euclidean"
    locally_minkowski = True

    def __init__(self, scale: float = 1.0, lo=(-1.0,) * 3, hi=(1.0,) * 3):
        self.scale = float(scale)
        super().__init__(lambda p: self.scale**2 * np.eye(3), lo, hi)

    def _F(self, p, y):
        return self.scale * np.linalg.norm(y, axis=-1)


def conformal_metric_field(base, log_gradient) -> Callable[[np.ndarray], np.ndarray]:
    """``a(p) = exp(2 c.p) A`` for a constant SPD ``A`` and covector ``c``."""
    base = np.asarray(base, dtype=float)
    c = np.asarray(log_gradient, dtype=float)
    ok, lam = spd_check(base)
    if not ok:
        raise ConfigurationError(f"base matrix is not positive definite (eigenvalue {lam:.3e})")
    return lambda p: np.exp(2.0 * float(c @ p)) * base


# --------------------------------------------------------------------------
# Minkowski norms and their perturbations


class QuarticMetric(FinslerMetric):
    """``F^2 = |y|^2 + eps(p) sqrt(sum_i y_i^4)`` with ``eps(p) = eps + grad.p``.

    With ``eps_gradient = 0`` the metric is locally Minkowski and octahedrally
    symmetric. A nonzero gradient changes the shape of the indicatrix from
    point to point, which no linear parallel transport can produce.
    """

    name = "quartic"

    def __init__(self, eps: float = 0.1, eps_gradient=(0.0, 0.0, 0.0), lo=(-1.0,) * 3, hi=(1.0,) * 3):
        super().__init__(lo, hi)
        self.eps = float(eps)
        self.eps_gradient = np.asarray(eps_gradient, dtype=float)
        self.locally_minkowski = not np.any(self.eps_gradient)

    def eps_at(self, p) -> float:
        return self.eps + float(self.eps_gradient @ np.asarray(p, dtype=float))

    def _F(self, p, y):
        eps = self.eps_at(p)
        sq = np.sum(y * y, axis=-1) + eps * np.sqrt(np.sum(y**4, axis=-1))
        return np.sqrt(sq)


class RandersMetric(FinslerMetric):
    """``F = |y| + b.y`` with a constant covector ``|b| < 1``."""

    name = "randers"
    locally_minkowski = True

    def __init__(self, b=(0.1, 0.0, 0.0), lo=(-1.0,) * 3, hi=(1.0,) * 3):
        super().__init__(lo, hi)
        self.b = np.asarray(b, dtype=float)
        if np.linalg.norm(self.b) >= 1.0:
            raise ConfigurationError("Randers drift must satisfy |b| < 1")

    def _F(self, p, y):
        return np.linalg.norm(y, axis=-1) + y @ self.b


# --------------------------------------------------------------------------
# Trifocal ellipsoid


@dataclass(frozen=True)
class TrifocalSpec:
    """Convex body ``|w + beta| + |w| + |w - beta| <= c`` in each tangent space."""

    beta: Callable[[np.ndarray], np.ndarray]
    c: float

    def beta_at(self, p) -> np.ndarray:
        return np.asarray(self.beta(np.asarray(p, dtype=float)), dtype=float)


def trifocal_potential(beta, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return (
        np.linalg.norm(w + beta, axis=-1)
        + np.linalg.norm(w, axis=-1)
        + np.linalg.norm(w - beta, axis=-1)
    )


def trifocal_gauge(beta, c: float, y, tol: float = 1e-15, max_iter: int = 100) -> np.ndarray:
    """Minkowski functional of the trifocal body at ``y``.

    Solves ``Phi(s y) = c`` for ``s = 1 / F(y)``. Along a ray ``s -> Phi(s y)``
    is convex with slope ``|y| > 0`` at the origin, so Newton started from the
    upper bracket ``c / (3|y|)`` decreases monotonically onto the root; any
    step leaving the bracket is replaced by bisection.
    """
    beta = np.asarray(beta, dtype=float)
    y = _as_y(y)
    c = float(c)
    if c <= 3.0 * np.linalg.norm(beta):
        raise ConfigurationError(
            f"trifocal constant c={c} must exceed 3|beta|={3 * np.linalg.norm(beta):.6g} "
            "so that all focal points lie inside the body"
        )
    ny = np.linalg.norm(y, axis=-1)
    if np.any(ny <= _ZERO_TOL):
        raise SingularPointError("trifocal gauge is undefined at y = 0")
    lo = np.zeros_like(ny)
    hi = c / (3.0 * ny)
    s = hi.copy()
    yb = y
    for _ in range(max_iter):
        a = s[..., None] * yb + beta
        m = s[..., None] * yb
        b = m - beta
        na = np.linalg.norm(a, axis=-1)
        nm = np.linalg.norm(m, axis=-1)
        nb = np.linalg.norm(b, axis=-1)
        g = na + nm + nb - c
        lo = np.where(g < 0, s, lo)
        hi = np.where(g > 0, s, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            dg = np.sum(yb * a, axis=-1) / na + ny + np.sum(yb * b, axis=-1) / nb
            step = g / dg
        s_new = s - step
        bad = ~np.isfinite(s_new) | (s_new < lo) | (s_new > hi)
        s_new = np.where(bad, 0.5 * (lo + hi), s_new)
        done = np.abs(s_new - s) <= tol * s
        s = s_new
        if np.all(done):
            break
    else:
        residual = float(np.max(np.abs(trifocal_potential(beta, s[..., None] * y) - c)))
        if residual > 1e-12 * c:
            raise ConfigurationError(f"trifocal root finder did not converge (residual {residual:.2e})")
    return 1.0 / s


def trifocal_F(spec: TrifocalSpec, p, y) -> np.ndarray:
    return trifocal_gauge(spec.beta_at(p), spec.c, y)


class TrifocalMetric(FinslerMetric):
    """Gauge of the trifocal ellipsoid with focal field ``beta(p) = beta + B p``."""

    name = "trifocal"

    def __init__(self, beta=(0.0, 0.0, 0.5), c: float = 3.0, beta_gradient=None, lo=(-1.0,) * 3, hi=(1.0,) * 3):
        super().__init__(lo, hi)
        b0 = np.asarray(beta, dtype=float)
        B = np.zeros((3, 3)) if beta_gradient is None else np.asarray(beta_gradient, dtype=float)
        self.locally_minkowski = not np.any(B)
        self.spec = TrifocalSpec(beta=lambda p: b0 + B @ p, c=float(c))
        # |beta| is convex along the box, so its maximum sits at a corner
        corners = lattice_points(self.lo, self.hi, (2, 2, 2))
        worst = max(np.linalg.norm(self.spec.beta_at(q)) for q in corners)
        if self.spec.c <= 3.0 * worst:
            raise ConfigurationError(
                f"trifocal constant c={self.spec.c} must exceed 3|beta|={3 * worst:.6g} on the whole chart"
            )

    def _F(self, p, y):
        return trifocal_F(self.spec, p, y)


# --------------------------------------------------------------------------
# Left-invariant metrics on SU(2)


def quat_mul(a, b) -> np.ndarray:
    """Hamilton product of quaternions stored as ``(w, x, y, z)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, av = a[..., 0], a[..., 1:]
    b0, bv = b[..., 0], b[..., 1:]
    w = a0 * b0 - np.sum(av * bv, axis=-1)
    v = a0[..., None] * bv + b0[..., None] * av + np.cross(av, bv)
    return np.concatenate([w[..., None], v], axis=-1)


def su2_point(p) -> np.ndarray:
    """Unit quaternion ``(sqrt(1 - |p|^2), p)`` of the projection chart."""
    p = np.asarray(p, dtype=float)
    r2 = float(p @ p)
    if r2 >= 1.0:
        raise ChartError(f"point {p.tolist()} is outside the SU(2) projection chart |p| < 1")
    return np.concatenate([[np.sqrt(1.0 - r2)], p])


def su2_chart_jacobian(p) -> np.ndarray:
    """Matrix of ``y -> Im(q(p)^{-1} dq(p)[y])`` (left-trivialised velocity).

    With ``w = sqrt(1 - |p|^2)`` this is ``w I + p p^T / w - [p]_x``.
    """
    p = np.asarray(p, dtype=float)
    w = su2_point(p)[0]
    px = np.array([[0.0, -p[2], p[1]], [p[2], 0.0, -p[0]], [-p[1], p[0], 0.0]])
    return w * np.eye(3) + np.outer(p, p) / w - px


@dataclass(frozen=True)
class LeftInvariantSU2Spec:
    base: FinslerMetric
    scale: float = 1.0


def left_invariant_F(spec: LeftInvariantSU2Spec, p, y) -> np.ndarray:
    xi = _as_y(y) @ su2_chart_jacobian(p).T
    return spec.scale * spec.base.F(np.zeros(3), xi)


class LeftInvariantSU2Metric(FinslerMetric):
    """Left translate of a Minkowski norm on the Lie algebra of SU(2).

    The Cartan connection whose parallel fields are the left-invariant ones
    is flat and preserves this metric.
    """

    name = "su2-left-invariant"

    def __init__(self, base: FinslerMetric | None = None, scale: float = 1.0, lo=(-0.4,) * 3, hi=(0.4,) * 3):
        super().__init__(lo, hi)
        if base is None:
            base = QuarticMetric(0.1)
        if not getattr(base, "locally_minkowski", False):
            raise ConfigurationError("the Lie-algebra norm must not depend on the base point")
        if scale <= 0:
            raise ConfigurationError("scale must be positive")
        if np.sum(np.maximum(np.abs(self.lo), np.abs(self.hi)) ** 2) >= 1.0:
            raise ConfigurationError("chart box must lie inside the unit ball |p| < 1")
        self.spec = LeftInvariantSU2Spec(base, float(scale))

    def _F(self, p, y):
        return left_invariant_F(self.spec, p, y)


def round_s3_matrix_field(scale: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Bi-invariant round metric of radius ``scale`` in the projection chart."""

    def a(p):
        J = su2_chart_jacobian(p)
        return scale**2 * J.T @ J

    return a


# --------------------------------------------------------------------------
# axiom verification


def fibonacci_directions(n: int) -> np.ndarray:
    """Deterministic, nearly uniform unit vectors (golden-angle spiral)."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (1.0 + np.sqrt(5.0)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def lattice_points(lo, hi, dims) -> np.ndarray:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    axes = [
        np.array([0.5 * (lo[i] + hi[i])]) if n == 1 else np.linspace(lo[i], hi[i], n)
        for i, n in enumerate(dims)
    ]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


@dataclass
class AxiomReport:
    homogeneity_residual: float
    euler_residual: float
    min_eigenvalue: float
    stability_ratio: float
    n_samples: int
    homogeneity_tol: float = 1e-10
    stability_tol: float = 1e-5
    failures: list[str] = field(default_factory=list)

    @property
    def convex(self) -> bool:
        return self.min_eigenvalue > 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_axioms(
    metric: FinslerMetric,
    points=None,
    n_directions: int = 64,
    scheme: DiffScheme | None = None,
) -> AxiomReport:
    """Scan regularity, positive homogeneity and strong convexity.

    The sample plan is a 3x3x3 lattice on the chart box (shrunk by 10%)
    times a Fibonacci direction set; no randomness is involved.
    """
    scheme = scheme or DiffScheme()
    if points is None:
        mid = 0.5 * (metric.lo + metric.hi)
        half = 0.45 * (metric.hi - metric.lo)
        points = lattice_points(mid - half, mid + half, (3, 3, 3))
    dirs = fibonacci_directions(n_directions)
    hom = euler = 0.0
    min_eig = np.inf
    stab = 0.0
    for p in np.atleast_2d(points):
        Fy = metric.F(p, dirs)
        for t in (0.5, 2.0, 3.7):
            hom = max(hom, float(np.max(np.abs(metric.F(p, t * dirs) - t * Fy) / (t * Fy))))
        g = riemann_finsler_metric(metric, p, dirs, scheme)
        g_half = riemann_finsler_metric(metric, p, dirs, scheme.halved())
        stab = max(stab, float(np.max(np.abs(g - g_half)) / np.max(np.abs(g))))
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(g))))
        # y^i g_ij = dE/dy^j, with dE/dy = F dF/dy
        dE = Fy[:, None] * fiber_gradient(metric, p, dirs, scheme)
        euler = max(euler, float(np.max(np.abs(np.einsum("ni,nij->nj", dirs, g) - dE)) / np.max(np.abs(dE))))
    rep = AxiomReport(hom, euler, min_eig, stab, len(np.atleast_2d(points)) * n_directions)
    if hom > rep.homogeneity_tol:
        rep.failures.append("homogeneity")
    if not rep.convex:
        rep.failures.append("convexity")
    if stab > rep.stability_tol:
        rep.failures.append("regularity")
    return rep


# --------------------------------------------------------------------------
# zoo


def make_metric(name: str, lo=None, hi=None, **params) -> FinslerMetric:
    """Construct a zoo metric by name; ``lo``/``hi`` set the chart box."""
    box = {}
    if lo is not None:
        box["lo"] = tuple(lo)
    if hi is not None:
        box["hi"] = tuple(hi)
    if name == "euclidean":
        return EuclideanMetric(params.pop("scale", 1.0), **box, **_no_extra(name, params))
    if name == "riemannian-conformal":
        base = params.pop("base", np.eye(3).tolist())
        grad = params.pop("log_gradient", [0.0, 0.0, 0.0])
        m = RiemannianMetric(conformal_metric_field(base, grad), **box, **_no_extra(name, params))
        m.name = name
        return m
    if name == "round-s3":
        scale = params.pop("scale", 1.0)
        box.setdefault("lo", (-0.4,) * 3)
        box.setdefault("hi", (0.4,) * 3)
        m = RiemannianMetric(round_s3_matrix_field(scale), **box, **_no_extra(name, params))
        m.name = name
        return m
    if name == "quartic":
        return QuarticMetric(params.pop("eps", 0.1), params.pop("eps_gradient", (0.0, 0.0, 0.0)), **box, **_no_extra(name, params))
    if name == "randers":
        return RandersMetric(params.pop("b", (0.1, 0.0, 0.0)), **box, **_no_extra(name, params))
    if name == "trifocal":
        return TrifocalMetric(
            params.pop("beta", (0.0, 0.0, 0.5)),
            params.pop("c", 3.0),
            params.pop("beta_gradient", None),
            **box,
            **_no_extra(name, params),
        )
    if name == "su2-left-invariant":
        base_cfg = dict(params.pop("base", {"name": "quartic", "eps": 0.1}))
        base = make_metric(base_cfg.pop("name"), **base_cfg)
        return LeftInvariantSU2Metric(base, params.pop("scale", 1.0), **box, **_no_extra(name, params))
    raise ConfigurationError(f"unknown metric {name!r}; known: {', '.join(METRIC_NAMES)}")


METRIC_NAMES = (
    "euclidean",
    "riemannian-conformal",
    "round-s3",
    "quartic",
    "randers",
    "trifocal",
    "su2-left-invariant",
)


def _no_extra(name, params):
    if params:
        raise ConfigurationError(f"unknown parameters for {name!r}: {sorted(params)}")
    return {}
