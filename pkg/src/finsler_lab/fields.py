"""Metric fields on the base chart: ``p -> SPD (3, 3) matrix``."""

from __future__ import annotations

import threading
from typing import Callable

import numpy as np

from .kernel import require_spd
from .metrics import ChartError


def point_key(p, decimals: int = 12) -> tuple:
    return tuple(float(x) for x in np.round(np.asarray(p, dtype=float), decimals) + 0.0)


class MetricField:
    """A Riemannian metric on a box chart, evaluated as ``field(p)``."""

    provenance = "direct input"

    def __init__(self, lo=(-np.inf,) * 3, hi=(np.inf,) * 3):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if np.any(p < self.lo) or np.any(p > self.hi):
            raise ChartError(f"stencil point {p.tolist()} lies outside the chart box")
        return p

    def __call__(self, p) -> np.ndarray:
        raise NotImplementedError


class ConstantMetricField(MetricField):
    def __init__(self, matrix, lo=(-np.inf,) * 3, hi=(np.inf,) * 3):
        super().__init__(lo, hi)
        self.matrix = np.asarray(matrix, dtype=float)
        require_spd(self.matrix)

    def __call__(self, p):
        self.check_point(p)
        return self.matrix.copy()


class FunctionMetricField(MetricField):
    """Wraps a callable ``p -> matrix``; symmetrises and checks positivity."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], lo=(-np.inf,) * 3, hi=(np.inf,) * 3, check: bool = True):
        super().__init__(lo, hi)
        self.func = func
        self.check = check

    def __call__(self, p):
        p = self.check_point(p)
        m = np.asarray(self.func(p), dtype=float)
        m = 0.5 * (m + m.T)
        if self.check:
            require_spd(m, f"metric at {p.tolist()}")
        return m


class CachedMetricField(MetricField):
    """Memoises an expensive field on (rounded) points.

    Inserts are idempotent, so concurrent readers at worst recompute a value.
    """

    def __init__(self, lo=(-np.inf,) * 3, hi=(np.inf,) * 3):
        super().__init__(lo, hi)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def _compute(self, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, p):
        p = self.check_point(p)
        key = point_key(p)
        hit = self._cache.get(key)
        if hit is not None:
            return hit.copy()
        m = self._compute(p)
        m.setflags(write=False)
        with self._lock:
            self._cache.setdefault(key, m)
        return m.copy()

    @property
    def cache_size(self) -> int:
        return len(self._cache)
