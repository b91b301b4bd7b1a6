"""Numerical laboratory for three-dimensional generalized Berwald manifolds.

Averaged Riemannian metrics by indicatrix quadrature, recovery of the
compatible connection with totally anti-symmetric torsion, and curvature /
Killing-field diagnostics.
"""

__version__ = "0.1.0"

from .kernel import DiffScheme, cross_product, hessian, spd_check, triple_product_check  # noqa: E402
from .metrics import (  # noqa: E402
    EuclideanMetric,
    FinslerMetric,
    LeftInvariantSU2Metric,
    QuarticMetric,
    RandersMetric,
    RiemannianMetric,
    TrifocalMetric,
    make_metric,
    riemann_finsler_metric,
    verify_axioms,
)
from .quadrature import SphericalQuadratureRule, integrate_over_indicatrix  # noqa: E402
from .fields import ConstantMetricField, FunctionMetricField, MetricField  # noqa: E402
from .connection import (  # noqa: E402
    assemble_compatible,
    curvature,
    levi_civita,
    parallel_transport,
    torsion_decompose,
    torsion_of,
)
from .averaging import AveragedMetricField, averaged_metric, recover_f, sigma  # noqa: E402
from .killing import extract_f_from_killing, lie_derivative_metric  # noqa: E402
from .classification import Verdict, classify  # noqa: E402

__all__ = [
    "AveragedMetricField",
    "ConstantMetricField",
    "DiffScheme",
    "EuclideanMetric",
    "FinslerMetric",
    "FunctionMetricField",
    "LeftInvariantSU2Metric",
    "MetricField",
    "QuarticMetric",
    "RandersMetric",
    "RiemannianMetric",
    "SphericalQuadratureRule",
    "TrifocalMetric",
    "Verdict",
    "assemble_compatible",
    "averaged_metric",
    "classify",
    "cross_product",
    "curvature",
    "extract_f_from_killing",
    "hessian",
    "integrate_over_indicatrix",
    "levi_civita",
    "lie_derivative_metric",
    "make_metric",
    "parallel_transport",
    "recover_f",
    "riemann_finsler_metric",
    "sigma",
    "spd_check",
    "torsion_decompose",
    "torsion_of",
    "triple_product_check",
    "verify_axioms",
]
