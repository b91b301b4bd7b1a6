"""A metric with no compatible linear connection.

Letting the quartic coefficient vary along x^1 changes the shape of the
indicatrix from point to point. No linear parallel transport maps one
indicatrix onto another, so the pointwise residual X_i^h E - f V_i E stays
large whatever f is chosen, and the classifier reports an inconsistency.
"""

import numpy as np

from finsler_lab import QuarticMetric, SphericalQuadratureRule, classify
from finsler_lab.averaging import pointwise_f_consistency

rule = SphericalQuadratureRule(16, 32)
p = np.array([0.1, 0.0, 0.0])
for slope in (0.0, 0.2, 0.5):
    metric = QuarticMetric(0.1, eps_gradient=(slope, 0.0, 0.0))
    print(f"slope {slope}: residual {pointwise_f_consistency(metric, p, rule=rule):.3e}")

report = classify(QuarticMetric(0.1, eps_gradient=(0.5, 0.0, 0.0)), [p], rule)
print("verdict:", report.verdict.value, "|", report.reasons[0])
