"""Classification of a chart into the branches allowed for compatible
connections with totally anti-symmetric torsion in dimension three."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .averaging import AveragedMetricField, FRecoveryResult, recover_f
from .connection import assemble_compatible, curvature, levi_civita
from .kernel import DiffScheme
from .killing import (
    PreconditionError,
    VectorField,
    constant_length_residual,
    covariant_constancy_residual,
    extract_f_from_killing,
    lie_derivative_metric,
)
from .metrics import FinslerMetric
from .quadrature import SphericalQuadratureRule


class Verdict(str, Enum):
    RIEMANNIAN = "riemannian-degenerate"
    CLASSICAL_BERWALD_FLAT = "classical-berwald-zero-curvature"
    PROPER_GB_POSITIVE = "proper-gb-constant-positive-curvature"
    NON_FLAT_KILLING = "non-flat-with-killing-candidate"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Tolerances:
    riemannian_threshold: float = 1e-8  # sigma relative to its Cauchy-Schwarz scale
    consistency: float = 1e-4  # max |X^{h*}E - f V E| on indicatrix nodes
    f_zero: float = 1e-6
    f_spread: float = 1e-3  # relative
    flat: float = 1e-3  # |R|_inf <= flat * max(1, |R*|_inf, f^2/4)
    curvature_match: float = 1e-3  # relative, K* against f^2/4
    killing: float = 1e-5  # relative, see extract_f_from_killing


PLANES = ((0, 1), (0, 2), (1, 2))


@dataclass
class PointRecord:
    point: list
    gamma: list
    sigma: float
    sigma_relative: float
    f: float | None
    degenerate: bool
    consistency: float
    curvature_norm: float | None = None
    levi_civita_curvature_norm: float | None = None
    sectional_levi_civita: list | None = None
    killing: dict | None = None


@dataclass
class ClassificationReport:
    verdict: Verdict
    records: list[PointRecord]
    summary: dict = field(default_factory=dict)
    reasons: list[str] = field(default_factory=list)

    @property
    def f_values(self) -> list[float]:
        return [r.f for r in self.records if r.f is not None]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "reasons": list(self.reasons),
            "summary": self.summary,
            "points": [asdict(r) for r in self.records],
        }


def _record(res: FRecoveryResult, gamma_p) -> PointRecord:
    return PointRecord(
        point=[float(x) for x in res.point],
        gamma=np.asarray(gamma_p).tolist(),
        sigma=res.denominator,
        sigma_relative=res.sigma_relative,
        f=res.f,
        degenerate=res.degenerate,
        consistency=res.consistency,
    )


def recover_on_plan(metric, points, rule, scheme, gamma, tol: Tolerances) -> list[PointRecord]:
    out = []
    for p in np.atleast_2d(points):
        res = recover_f(metric, p, rule, scheme, gamma, tol.riemannian_threshold)
        out.append(_record(res, gamma(p)))
    return out


def classify(
    metric: FinslerMetric,
    points,
    rule: SphericalQuadratureRule | None = None,
    scheme: DiffScheme | None = None,
    tol: Tolerances | None = None,
    beta: VectorField | None = None,
    gamma: AveragedMetricField | None = None,
) -> ClassificationReport:
    """Run f-recovery, compatibility and curvature checks over a sample plan.

    Branches, in order: all indicatrices spheres of the averaged metric;
    compatibility residual too large (or spheres at only some points);
    ``f = 0`` with flat Levi-Civita curvature; constant ``f != 0`` with flat
    assembled connection and Levi-Civita sectional curvature ``f^2/4``;
    otherwise a non-flat connection, for which a supplied ``beta`` is
    checked as a parallel Killing section.
    """
    rule = rule or SphericalQuadratureRule()
    scheme = scheme or DiffScheme()
    tol = tol or Tolerances()
    gamma = gamma or AveragedMetricField(metric, rule, scheme)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    records = recover_on_plan(metric, points, rule, scheme, gamma, tol)
    report = ClassificationReport(Verdict.INCONSISTENT, records)
    max_cons = max(r.consistency for r in records)
    report.summary["max_consistency"] = max_cons

    n_deg = sum(r.degenerate for r in records)
    if n_deg == len(records):
        report.verdict = Verdict.RIEMANNIAN
        report.reasons.append("indicatrix is a sphere of the averaged metric at every sampled point")
        return report
    if n_deg:
        report.reasons.append(f"indicatrix is a sphere of the averaged metric at {n_deg} of {len(records)} points only")
        return report
    if max_cons > tol.consistency:
        report.reasons.append(f"pointwise compatibility residual {max_cons:.3e} exceeds {tol.consistency:.1e}")
        return report

    fs = np.array([r.f for r in records])
    f_mean = float(np.mean(fs))
    zero = bool(np.max(np.abs(fs)) <= tol.f_zero)
    spread = 0.0 if zero else float((fs.max() - fs.min()) / np.mean(np.abs(fs)))
    constant = zero or spread <= tol.f_spread
    report.summary.update(f_mean=f_mean, f_spread=spread, f_constant=constant)

    if zero:
        f_model: object = 0.0
    elif constant:
        f_model = f_mean
    else:
        f_model = _recovered_f_field(metric, rule, scheme, gamma, tol)
    conn = assemble_compatible(gamma, f_model, scheme)
    lc = levi_civita(gamma, scheme)
    flat_all = True
    match = 0.0
    for rec, p in zip(records, points):
        R = curvature(conn, p, scheme)
        Rs = curvature(lc, p, scheme)
        g = gamma(p)
        e = np.eye(3)
        ks = [Rs.sectional(g, e[a], e[b]) for a, b in PLANES]
        rec.curvature_norm = R.norm()
        rec.levi_civita_curvature_norm = Rs.norm()
        rec.sectional_levi_civita = ks
        fl = (rec.f or 0.0) ** 2 / 4.0
        flat_all &= R.norm() <= tol.flat * max(1.0, Rs.norm(), fl)
        if not zero:
            match = max(match, max(abs(k - fl) for k in ks) / fl)
    report.summary.update(flat=flat_all, sectional_mismatch=match)

    if flat_all:
        if zero:
            report.verdict = Verdict.CLASSICAL_BERWALD_FLAT
            report.reasons.append("f vanishes and the averaged metric is flat")
        elif constant and match <= tol.curvature_match:
            report.verdict = Verdict.PROPER_GB_POSITIVE
            report.reasons.append("constant f != 0, flat compatible connection, sectional curvature f^2/4")
        else:
            report.reasons.append("flat connection but f is not constant or curvature differs from f^2/4")
    else:
        report.verdict = Verdict.NON_FLAT_KILLING
        report.reasons.append("compatible connection has nonzero curvature")
    if beta is not None and report.verdict is not Verdict.INCONSISTENT:
        for rec, p in zip(records, points):
            rec.killing = killing_evidence(beta, gamma, conn, p, scheme, tol, rec.f or 0.0)
    return report


def killing_evidence(beta, gamma, conn, p, scheme, tol: Tolerances, f_recovered: float) -> dict:
    ev = {
        "parallel_residual": float(np.max(np.abs(covariant_constancy_residual(beta, conn, p, scheme)))),
        "lie_derivative": float(np.max(np.abs(lie_derivative_metric(beta, gamma, p, scheme)))),
        "length_gradient": float(np.max(np.abs(constant_length_residual(beta, gamma, p, scheme)))),
    }
    try:
        ex = extract_f_from_killing(beta, gamma, p, scheme, tol.killing)
    except PreconditionError as exc:
        ev["extraction_error"] = exc.check
    else:
        ev["f_killing"] = ex.f
        ev["f_fit_residual"] = ex.residual
        if f_recovered:
            ev["f_relative_difference"] = abs(ex.f - f_recovered) / abs(f_recovered)
    return ev


def _recovered_f_field(metric, rule, scheme, gamma, tol):
    cache: dict = {}

    def f(p):
        key = tuple(np.round(p, 12))
        if key not in cache:
            cache[key] = recover_f(metric, p, rule, scheme, gamma, tol.riemannian_threshold).f or 0.0
        return cache[key]

    return f
