"""Chart-local linear algebra and finite-difference primitives.

Everything here works in three dimensions only. Vectors are numpy arrays
whose last axis has length 3; metrics are symmetric ``(3, 3)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Levi-Civita symbol eps[i, j, k]
EPS = np.zeros((3, 3, 3))
EPS[0, 1, 2] = EPS[1, 2, 0] = EPS[2, 0, 1] = 1.0
EPS[0, 2, 1] = EPS[2, 1, 0] = EPS[1, 0, 2] = -1.0

_D1 = {
    2: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    4: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}
# second-derivative stencils; the centre weight is kept separately
_D2 = {
    2: (np.array([-1.0, 1.0]), np.array([1.0, 1.0]), -2.0),
    4: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([-1.0, 16.0, 16.0, -1.0]) / 12.0, -30.0 / 12.0),
}


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix that must serve as a metric is not SPD."""

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True)
class DiffScheme:
    """Finite-difference steps for base (``x``) and fiber (``y``) derivatives.

    The fiber step is applied to unit-normalised directions (the fiber Hessian
    of a 2-homogeneous energy is 0-homogeneous), so it is an absolute step.
    """

    h_base: float = 5e-3
    h_fiber: float = 2e-3
    order: int = 4

    def __post_init__(self):
        if self.h_base <= 0 or self.h_fiber <= 0:
            raise ValueError("finite-difference steps must be positive")
        if self.order not in (2, 4):
            raise ValueError(f"unsupported stencil order {self.order}; use 2 or 4")

    def halved(self) -> "DiffScheme":
        return DiffScheme(self.h_base / 2, self.h_fiber / 2, self.order)


def spd_check(m) -> tuple[bool, float]:
    """Return ``(is_positive_definite, smallest_eigenvalue)``."""
    m = np.asarray(m, dtype=float)
    lam = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])
    return lam > 0.0, lam


def require_spd(m, what: str = "metric") -> None:
    ok, lam = spd_check(m)
    if not ok:
        raise NotPositiveDefiniteError(
            f"{what} is not positive definite (smallest eigenvalue {lam:.3e})", lam
        )


def cross_tensor(metric) -> np.ndarray:
    """Components ``C[k, i, j]`` of ``e_i x e_j`` for the given metric.

    Normalised by the Riemannian volume form: ``metric(e_i x e_j, e_l) =
    sqrt(det metric) * eps[i, j, l]``.
    """
    metric = np.asarray(metric, dtype=float)
    vol = np.sqrt(np.linalg.det(metric))
    inv = np.linalg.inv(metric)
    return vol * np.einsum("kl,ijl->kij", inv, EPS)


def cross_product(metric, a, b, *, check: bool = True) -> np.ndarray:
    """Cross product of ``a`` and ``b`` with respect to ``metric``.

    Returns the unique ``c`` with ``metric(c, z) = sqrt(det metric) det[a|b|z]``
    for every ``z``. Broadcasts over leading axes of ``a`` and ``b``.

    Examples
    --------
    >>> cross_product(np.diag([4.0, 1.0, 1.0]), [1, 0, 0], [0, 1, 0])
    array([0., 0., 2.])
    """
    metric = np.asarray(metric, dtype=float)
    if check:
        require_spd(metric)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lowered = np.sqrt(np.linalg.det(metric)) * np.cross(a, b)
    return lowered @ np.linalg.inv(metric)


def inner(metric, a, b) -> np.ndarray:
    return np.einsum("...i,ij,...j->...", np.asarray(a, float), metric, np.asarray(b, float))


def triple_product_check(metric, x, y, z) -> float:
    """Max-norm residual of ``x x (y x z) = <x,z> y - <x,y> z``."""
    metric = np.asarray(metric, dtype=float)
    lhs = cross_product(metric, x, cross_product(metric, y, z))
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    rhs = inner(metric, x, z)[..., None] * y - inner(metric, x, y)[..., None] * z
    return float(np.max(np.abs(lhs - rhs)))


def jacobi_identity_residual(metric, x, y, z) -> float:
    """Max-norm of ``(x×y)×z + (z×x)×y + (y×z)×x``."""
    cp = lambda a, b: cross_product(metric, a, b)  # noqa: E731
    total = cp(cp(x, y), z) + cp(cp(z, x), y) + cp(cp(y, z), x)
    return float(np.max(np.abs(total)))


def _hessian_directions() -> np.ndarray:
    e = np.eye(3)
    dirs = [e[0], e[1], e[2]]
    for a, b in ((0, 1), (0, 2), (1, 2)):
        dirs.append(e[a] + e[b])
        dirs.append(e[a] - e[b])
    return np.array(dirs)


_HDIRS = _hessian_directions()


def hessian(field: Callable[[np.ndarray], np.ndarray], point, h: float = 2e-3, order: int = 4) -> np.ndarray:
    """Central finite-difference Hessian of a scalar field on R^3.

    ``field`` must accept an array of shape ``(..., 3)`` and return ``(...)``.
    ``point`` may carry leading batch axes; the result has shape
    ``point.shape[:-1] + (3, 3)``. Mixed partials come from polarisation of
    second directional derivatives along ``e_a ± e_b``, which makes the
    result symmetric by construction and exact for quadratic fields.
    """
    point = np.asarray(point, dtype=float)
    offsets, weights, w0 = _D2[order]
    # stencil points: (..., ndir, noff, 3)
    steps = offsets[None, :, None] * _HDIRS[:, None, :] * h
    pts = point[..., None, None, :] + steps
    vals = field(pts)
    centre = field(point)
    d2 = (np.tensordot(vals, weights, axes=([-1], [0])) + w0 * centre[..., None]) / h**2
    H = np.empty(point.shape[:-1] + (3, 3))
    for a in range(3):
        H[..., a, a] = d2[..., a]
    k = 3
    for a, b in ((0, 1), (0, 2), (1, 2)):
        H[..., a, b] = H[..., b, a] = 0.25 * (d2[..., k] - d2[..., k + 1])
        k += 2
    return H


def gradient(field: Callable[[np.ndarray], np.ndarray], point, h: float = 2e-3, order: int = 4) -> np.ndarray:
    """Finite-difference gradient of a vectorised scalar field, shape ``(..., 3)``."""
    point = np.asarray(point, dtype=float)
    offsets, weights = _D1[order]
    steps = offsets[None, :, None] * np.eye(3)[:, None, :] * h
    vals = field(point[..., None, None, :] + steps)
    return np.tensordot(vals, weights, axes=([-1], [0])) / h


def partial_derivatives(func: Callable[[np.ndarray], np.ndarray], p, h: float = 2e-3, order: int = 4) -> np.ndarray:
    """Coordinate derivatives of an arbitrary array-valued function of a point.

    ``func`` maps a single point ``(3,)`` to an array of any shape ``S``;
    the result has shape ``(3,) + S`` with ``out[i] = d func / d x^i``.
    Evaluation points are snapped to exact multiples of ``h`` away from ``p``
    so callers that memoise on points see repeated lattice nodes.
    """
    p = np.asarray(p, dtype=float)
    offsets, weights = _D1[order]
    out = None
    for i in range(3):
        acc = None
        for off, w in zip(offsets, weights):
            q = p.copy()
            q[i] = p[i] + off * h
            val = w * np.asarray(func(q), dtype=float)
            acc = val if acc is None else acc + val
        acc = acc / h
        if out is None:
            out = np.empty((3,) + acc.shape)
        out[i] = acc
    return out
