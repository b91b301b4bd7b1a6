"""A left-invariant Finsler metric on SU(2) and its flat compatible connection.

In the projection chart q = (sqrt(1 - |p|^2), p) a Minkowski norm on the Lie
algebra is left-translated over the group. The parallel fields of the
Cartan connection are the left-invariant ones, so transport preserves F,
and that connection is nabla* + (f/2) X x Y for the averaged metric with a
constant negative f. Flatness then forces the sectional curvature of the
averaged metric to equal f^2 / 4.
"""

import numpy as np

from finsler_lab import AveragedMetricField, LeftInvariantSU2Metric, QuarticMetric, assemble_compatible, curvature, levi_civita, recover_f
from finsler_lab.connection import Curve, parallel_transport, transport_drift

metric = LeftInvariantSU2Metric(QuarticMetric(0.1))
gamma = AveragedMetricField(metric)

fs = []
for p in ([0.0, 0.0, 0.0], [0.2, -0.1, 0.0], [-0.1, 0.15, 0.2]):
    res = recover_f(metric, np.array(p), gamma=gamma)
    fs.append(res.f)
    print(f"p={p}  f={res.f:.10f}  consistency={res.consistency:.1e}")

f = float(np.mean(fs))
kappa = gamma(np.zeros(3))[0, 0]
print(f"-2/sqrt(kappa) at the identity: {-2 / np.sqrt(kappa):.10f}")

p = np.array([0.1, 0.0, -0.05])
R = curvature(assemble_compatible(gamma, f), p)
Rs = curvature(levi_civita(gamma), p)
g = gamma(p)
print(f"|R| of the assembled connection: {R.norm():.2e}")
print(f"sectional curvature of gamma in the (e1, e2) plane: {Rs.sectional(g, [1, 0, 0], [0, 1, 0]):.8f}")
print(f"f^2 / 4: {f * f / 4:.8f}")

loop = Curve.circle(p, 0.05, [1, 0, 0], [0, 1, 0])
tr = parallel_transport(assemble_compatible(gamma, f), loop, [0.2, 0.9, -0.4], steps=8, tol=1e-6)
print(f"transport around a loop: {tr.steps} steps, F drift {transport_drift(metric, loop, tr):.1e}")
