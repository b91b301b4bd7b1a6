"""Locally Minkowski metrics: the averaged connection is flat and f = 0.

The quartic perturbation F^2 = |y|^2 + eps sqrt(sum y_i^4) does not depend
on the base point. Its indicatrix is not an ellipsoid, so sigma is positive,
but the horizontal derivatives of E vanish for the flat connection and the
recovered torsion scalar is zero.
"""

import numpy as np

from finsler_lab import QuarticMetric, RandersMetric, SphericalQuadratureRule, TrifocalMetric, classify, recover_f
from finsler_lab.metrics import lattice_points

rule = SphericalQuadratureRule(16, 32)
for metric in (QuarticMetric(0.1), RandersMetric((0.2, -0.1, 0.0)), TrifocalMetric()):
    res = recover_f(metric, np.array([0.1, 0.2, -0.1]), rule)
    print(f"{metric.name:10s} sigma_rel={res.sigma_relative:.3e} f={res.f:+.2e} consistency={res.consistency:.1e}")

points = lattice_points([-0.2] * 3, [0.2] * 3, (2, 2, 1))
report = classify(QuarticMetric(0.1), points, rule)
print("verdict:", report.verdict.value)
print("reasons:", "; ".join(report.reasons))
