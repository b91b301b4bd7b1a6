"""Linear connections on the chart: Levi-Civita, cross-product torsion, curvature.

Christoffel arrays use the layout ``G[k, i, j] = Gamma^k_ij`` with
``nabla_{e_i} e_j = Gamma^k_ij e_k``. Curvature arrays use
``R[l, i, j, k]`` for the ``e_l`` component of ``R(e_i, e_j) e_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import MetricField, point_key
from .kernel import DiffScheme, cross_tensor, partial_derivatives
from .metrics import FinslerMetric, fiber_gradient

ScalarLike = float | Callable[[np.ndarray], float]


def as_scalar_field(f: ScalarLike) -> Callable[[np.ndarray], float]:
    if callable(f):
        return f
    value = float(f)
    return lambda p: value


def scalar_gradient(f: ScalarLike, p, scheme: DiffScheme) -> np.ndarray:
    if not callable(f):
        return np.zeros(3)
    return partial_derivatives(lambda q: np.asarray(f(q), dtype=float), p, scheme.h_base, scheme.order)


class ConnectionField:
    """Christoffel symbols as a function of the base point.

    ``metric`` and ``f`` are recorded when the connection is metrical for
    a known field, or of cross-product type ``nabla* + (f/2) X x Y``.
    """

    def __init__(
        self,
        christoffel: Callable[[np.ndarray], np.ndarray],
        metric: MetricField | None = None,
        f: ScalarLike | None = None,
        scheme: DiffScheme | None = None,
        name: str = "connection",
    ):
        self._christoffel = christoffel
        self.metric = metric
        self.f = f
        self.scheme = scheme or DiffScheme()
        self.name = name
        self._cache: dict = {}

    def christoffel(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        key = point_key(p)
        hit = self._cache.get(key)
        if hit is None:
            hit = np.asarray(self._christoffel(p), dtype=float)
            hit.setflags(write=False)
            self._cache.setdefault(key, hit)
        return hit.copy()

    __call__ = christoffel


def flat_connection() -> ConnectionField:
    return ConnectionField(lambda p: np.zeros((3, 3, 3)), name="flat")


def christoffel_levi_civita(metric: MetricField, p, scheme: DiffScheme | None = None) -> np.ndarray:
    """Levi-Civita symbols from central differences of the metric."""
    scheme = scheme or DiffScheme()
    p = np.asarray(p, dtype=float)
    g = metric(p)
    dg = partial_derivatives(metric, p, scheme.h_base, scheme.order)  # dg[m, i, j] = d_m g_ij
    # lowered[l, i, j] = (d_i g_lj + d_j g_li - d_l g_ij) / 2
    lowered = 0.5 * (np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg)
    return np.einsum("kl,lij->kij", np.linalg.inv(g), lowered)


def levi_civita(metric: MetricField, scheme: DiffScheme | None = None) -> ConnectionField:
    scheme = scheme or DiffScheme()
    return ConnectionField(
        lambda p: christoffel_levi_civita(metric, p, scheme), metric=metric, f=0.0, scheme=scheme, name="levi-civita"
    )


def assemble_compatible(metric: MetricField, f: ScalarLike, scheme: DiffScheme | None = None) -> ConnectionField:
    """``nabla = nabla* + (f/2) X x Y`` for the metric's Levi-Civita ``nabla*``."""
    scheme = scheme or DiffScheme()
    fs = as_scalar_field(f)

    def gamma(p):
        return christoffel_levi_civita(metric, p, scheme) + 0.5 * fs(p) * cross_tensor(metric(p))

    return ConnectionField(gamma, metric=metric, f=f, scheme=scheme, name="cross-product")


def metricity_residual(conn: ConnectionField, metric: MetricField, p, scheme: DiffScheme | None = None) -> float:
    """Max of ``|d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|``."""
    scheme = scheme or conn.scheme
    p = np.asarray(p, dtype=float)
    g = metric(p)
    dg = partial_derivatives(metric, p, scheme.h_base, scheme.order)
    G = conn.christoffel(p)
    res = dg - np.einsum("lki,lj->kij", G, g) - np.einsum("lkj,il->kij", G, g)
    return float(np.max(np.abs(res)))


# --------------------------------------------------------------------------
# torsion


@dataclass
class TorsionTensor:
    components: np.ndarray  # T[k, i, j], antisymmetric in (i, j)

    def lowered(self, metric) -> np.ndarray:
        """``T_flat[i, j, l] = g(T(e_i, e_j), e_l)``."""
        return np.einsum("lk,kij->ijl", np.asarray(metric, dtype=float), self.components)

    def trace(self) -> np.ndarray:
        """``T~_i = T^k_ik``, the trace of ``Y -> T(e_i, Y)``."""
        return np.einsum("kik->i", self.components)

    def antisymmetry_residual(self, metric) -> float:
        L = self.lowered(metric)
        return float(
            max(
                np.max(np.abs(L + L.transpose(1, 0, 2))),
                np.max(np.abs(L + L.transpose(0, 2, 1))),
                np.max(np.abs(L + L.transpose(2, 1, 0))),
            )
        )


def torsion_of(conn: ConnectionField, p) -> TorsionTensor:
    G = conn.christoffel(p)
    return TorsionTensor(G - G.transpose(0, 2, 1))


def torsion_decompose(T: TorsionTensor, metric) -> tuple[TorsionTensor, TorsionTensor, TorsionTensor]:
    """Split torsion into axial ``A1``, traceless non-axial ``S1`` and trace ``T2`` parts."""
    metric = np.asarray(metric, dtype=float)
    n = 3
    tr = T.trace()
    eye = np.eye(n)
    T2 = (np.einsum("i,kj->kij", tr, eye) - np.einsum("j,ki->kij", tr, eye)) / (n - 1)
    T1 = T.components - T2
    L = np.einsum("lk,kij->ijl", metric, T1)
    A_low = (L + L.transpose(1, 2, 0) + L.transpose(2, 0, 1)) / 3.0
    A1 = np.einsum("kl,ijl->kij", np.linalg.inv(metric), A_low)
    return TorsionTensor(A1), TorsionTensor(T1 - A1), TorsionTensor(T2)


# --------------------------------------------------------------------------
# compatibility and parallel transport


def compatibility_residual(metric: FinslerMetric, conn: ConnectionField, p, v, scheme: DiffScheme | None = None) -> np.ndarray:
    """``X_i^h F = dF/dx^i - v^j Gamma^k_ij dF/dy^k`` at ``(p, v)``, shape ``(..., 3)``."""
    scheme = scheme or conn.scheme
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    dFdx = partial_derivatives(lambda q: metric.F(q, v), p, scheme.h_base, scheme.order)
    dFdx = np.moveaxis(dFdx, 0, -1)
    dFdy = fiber_gradient(metric, p, v, scheme)
    G = conn.christoffel(p)
    return dFdx - np.einsum("...j,kij,...k->...i", v, G, dFdy)


class TransportInstabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Curve:
    """A parametrised curve ``c: [0, 1] -> chart`` with its velocity."""

    position: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    closed: bool = False

    @classmethod
    def segment(cls, a, b) -> "Curve":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(lambda t: a + t * (b - a), lambda t: b - a)

    @classmethod
    def circle(cls, center, radius: float, axis1=(1.0, 0.0, 0.0), axis2=(0.0, 1.0, 0.0)) -> "Curve":
        c = np.asarray(center, dtype=float)
        e1 = np.asarray(axis1, dtype=float)
        e2 = np.asarray(axis2, dtype=float)
        w = 2.0 * np.pi
        return cls(
            lambda t: c + radius * (np.cos(w * t) * e1 + np.sin(w * t) * e2),
            lambda t: radius * w * (-np.sin(w * t) * e1 + np.cos(w * t) * e2),
            closed=True,
        )

    def length(self, n: int = 512) -> float:
        t = (np.arange(n) + 0.5) / n
        return float(np.mean([np.linalg.norm(self.velocity(s)) for s in t]))


@dataclass
class TransportResult:
    vector: np.ndarray
    times: np.ndarray
    path: np.ndarray  # X(t_m), shape (steps + 1, 3)
    steps: int
    halving_change: float


def _rk4(conn: ConnectionField, curve: Curve, v0: np.ndarray, steps: int):
    def rhs(t, X):
        G = conn.christoffel(curve.position(t))
        return -np.einsum("i,kij,j->k", curve.velocity(t), G, X)

    h = 1.0 / steps
    X = v0.copy()
    path = [X.copy()]
    for m in range(steps):
        t = m * h
        k1 = rhs(t, X)
        k2 = rhs(t + 0.5 * h, X + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, X + 0.5 * h * k2)
        k4 = rhs(t + h, X + h * k3)
        X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        path.append(X.copy())
    return np.array(path)


def parallel_transport(
    conn: ConnectionField,
    curve: Curve,
    v0,
    steps: int = 16,
    tol: float = 1e-8,
    max_steps: int = 1024,
) -> TransportResult:
    """Integrate ``X'^k = -c'^i Gamma^k_ij X^j`` with classical RK4.

    The step count doubles until halving it changes the endpoint by at most
    ``tol * max(1, |v0|)``; exceeding ``max_steps`` raises
    :class:`TransportInstabilityError`.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    v0 = np.asarray(v0, dtype=float)
    scale = max(1.0, float(np.linalg.norm(v0)))
    coarse = _rk4(conn, curve, v0, steps)
    while True:
        fine = _rk4(conn, curve, v0, 2 * steps)
        change = float(np.max(np.abs(fine[-1] - coarse[-1])))
        if change <= tol * scale:
            n = 2 * steps
            return TransportResult(fine[-1], np.linspace(0.0, 1.0, n + 1), fine, n, change)
        steps *= 2
        if 2 * steps > max_steps:
            raise TransportInstabilityError(
                f"transport endpoint still changes by {change:.2e} under step halving at {steps} steps"
            )
        coarse = fine


def transport_drift(metric: FinslerMetric, curve: Curve, result: TransportResult) -> float:
    """``max_t |F(c(t), X(t)) - F(c(0), X(0))|`` along a transport path."""
    vals = np.array([metric.F(curve.position(t), X) for t, X in zip(result.times, result.path)])
    return float(np.max(np.abs(vals - vals[0])))


# --------------------------------------------------------------------------
# curvature


@dataclass
class CurvatureOperator:
    components: np.ndarray  # R[l, i, j, k]
    point: np.ndarray

    def apply(self, X, Y, Z) -> np.ndarray:
        return np.einsum("lijk,i,j,k->l", self.components, X, Y, Z)

    def lowered(self, metric) -> np.ndarray:
        """``L[i, j, k, w] = g(R(e_i, e_j) e_k, e_w)``."""
        return np.einsum("wl,lijk->ijkw", np.asarray(metric, dtype=float), self.components)

    def norm(self) -> float:
        return float(np.max(np.abs(self.components)))

    def sectional(self, metric, X, Y) -> float:
        metric = np.asarray(metric, dtype=float)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        gram = (X @ metric @ X) * (Y @ metric @ Y) - (X @ metric @ Y) ** 2
        if gram <= 1e-14 * (X @ metric @ X) * (Y @ metric @ Y):
            raise ValueError("sectional curvature needs linearly independent vectors")
        return float(self.apply(X, Y, Y) @ metric @ X / gram)


def curvature(conn: ConnectionField, p, scheme: DiffScheme | None = None) -> CurvatureOperator:
    """``R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik``."""
    scheme = scheme or conn.scheme
    p = np.asarray(p, dtype=float)
    G = conn.christoffel(p)
    dG = partial_derivatives(conn.christoffel, p, scheme.h_base, scheme.order)  # dG[i, l, j, k]
    R = (
        np.einsum("iljk->lijk", dG)
        - np.einsum("jlik->lijk", dG)
        + np.einsum("lim,mjk->lijk", G, G)
        - np.einsum("ljm,mik->lijk", G, G)
    )
    return CurvatureOperator(R, p)


def curvature_comparison_rhs(metric: MetricField, f: ScalarLike, p, scheme: DiffScheme | None = None) -> CurvatureOperator:
    """Curvature of ``nabla* + (f/2) x`` predicted from the Levi-Civita curvature.

    ``R*(X,Y)Z + ((Xf) Y - (Yf) X) x Z / 2 + f^2/4 (X x Y) x Z`` for
    coordinate fields ``X = e_i, Y = e_j, Z = e_k``.
    """
    scheme = scheme or DiffScheme()
    p = np.asarray(p, dtype=float)
    Rs = curvature(levi_civita(metric, scheme), p, scheme).components
    C = cross_tensor(metric(p))  # C[k, i, j] = (e_i x e_j)^k
    fval = as_scalar_field(f)(p)
    df = scalar_gradient(f, p, scheme)
    # ((d_i f) e_j - (d_j f) e_i) x e_k
    grad_term = 0.5 * (np.einsum("i,ljk->lijk", df, C) - np.einsum("j,lik->lijk", df, C))
    # (e_i x e_j) x e_k = C[m, i, j] C[l, m, k]
    quad_term = 0.25 * fval**2 * np.einsum("mij,lmk->lijk", C, C)
    return CurvatureOperator(Rs + grad_term + quad_term, p)


@dataclass
class SectionalComparison:
    k_levi_civita: float  # sectional value of R*
    k_connection: float  # sectional value of R (finite differences)
    k_predicted: float  # k_levi_civita - f^2 / 4
    defect: float


def sectional_comparison(metric: MetricField, f: ScalarLike, p, X, Y, scheme: DiffScheme | None = None) -> SectionalComparison:
    scheme = scheme or DiffScheme()
    g = metric(p)
    ks = curvature(levi_civita(metric, scheme), p, scheme).sectional(g, X, Y)
    kn = curvature(assemble_compatible(metric, f, scheme), p, scheme).sectional(g, X, Y)
    pred = ks - as_scalar_field(f)(np.asarray(p, dtype=float)) ** 2 / 4.0
    return SectionalComparison(ks, kn, pred, abs(kn - pred))


@dataclass
class JacobiDefect:
    cyclic_sum: np.ndarray  # R(X,Y)Z + R(Z,X)Y + R(Y,Z)X by finite differences
    predicted: np.ndarray  # (Xf) Y x Z + (Zf) X x Y + (Yf) Z x X
    defect: np.ndarray


def jacobi_defect(metric: MetricField, f: ScalarLike, p, X, Y, Z, scheme: DiffScheme | None = None, f_gradient=None) -> JacobiDefect:
    """Cyclic curvature sum of the cross-product connection and its closed form.

    ``f_gradient`` may supply ``df(p)`` analytically; otherwise it is
    differenced.
    """
    scheme = scheme or DiffScheme()
    p = np.asarray(p, dtype=float)
    X, Y, Z = (np.asarray(a, dtype=float) for a in (X, Y, Z))
    R = curvature(assemble_compatible(metric, f, scheme), p, scheme)
    lhs = R.apply(X, Y, Z) + R.apply(Z, X, Y) + R.apply(Y, Z, X)
    df = np.asarray(f_gradient(p), dtype=float) if f_gradient is not None else scalar_gradient(f, p, scheme)
    C = cross_tensor(metric(p))
    cp = lambda a, b: np.einsum("kij,i,j->k", C, a, b)  # noqa: E731
    rhs = (df @ X) * cp(Y, Z) + (df @ Z) * cp(X, Y) + (df @ Y) * cp(Z, X)
    return JacobiDefect(lhs, rhs, lhs - rhs)


def block_symmetry_residual(R: CurvatureOperator, metric) -> float:
    """Max of ``|g(R(X,Y)Z,W) - g(R(Z,W)X,Y)|`` over coordinate fields."""
    L = R.lowered(metric)
    return float(np.max(np.abs(L - L.transpose(2, 3, 0, 1))))


def curvature_antisymmetry_residuals(R: CurvatureOperator, metric) -> tuple[float, float]:
    """Residuals of ``R(X,Y) = -R(Y,X)`` and of ``g(R(X,Y)Z,W) = -g(R(X,Y)W,Z)``."""
    C = R.components
    L = R.lowered(metric)
    return float(np.max(np.abs(C + C.transpose(0, 2, 1, 3)))), float(np.max(np.abs(L + L.transpose(0, 1, 3, 2))))
