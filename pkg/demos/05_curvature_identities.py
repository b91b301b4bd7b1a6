"""Curvature of nabla = nabla* + (f/2) X x Y against its closed form.

On the unit three-sphere both f = 2 and f = -2 give flat connections. For a
non-constant f the first Bianchi sum no longer vanishes; it is
(Xf) Y x Z + (Zf) X x Y + (Yf) Z x X.
"""

import numpy as np

from finsler_lab import assemble_compatible, curvature, levi_civita
from finsler_lab.connection import curvature_comparison_rhs, jacobi_defect
from finsler_lab.fields import FunctionMetricField
from finsler_lab.metrics import round_s3_matrix_field

g = FunctionMetricField(round_s3_matrix_field(1.0))
p = np.array([0.1, -0.2, 0.15])

print(f"sectional curvature of the round metric: {curvature(levi_civita(g), p).sectional(g(p), [1, 0, 0], [0, 0, 1]):.8f}")
for f in (-2.0, 2.0, 1.0):
    print(f"f={f:+.0f}: |R| = {curvature(assemble_compatible(g, f), p).norm():.2e}")

f = lambda q: 1.0 + q[0] - 0.5 * q[2] ** 2  # noqa: E731
R = curvature(assemble_compatible(g, f), p).components
rhs = curvature_comparison_rhs(g, f, p).components
print(f"finite differences vs comparison formula: {np.max(np.abs(R - rhs)):.1e}")

X, Y, Z = np.random.default_rng(0).normal(size=(3, 3))
d = jacobi_defect(g, lambda q: q[0], p, X, Y, Z, f_gradient=lambda q: np.array([1.0, 0.0, 0.0]))
print("cyclic sum:", np.round(d.cyclic_sum, 8))
print("predicted: ", np.round(d.predicted, 8))
