"""Batch command-line workflows.

Exit codes: 0 success, 1 usage or configuration error, 2 a mathematical
inconsistency was detected (verdict ``inconsistent``, excessive transport
drift or compatibility residual).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .averaging import AveragedMetricField, recover_f
from .classification import Verdict, classify
from .config import ConfigError, RunConfig, load_config
from .connection import (
    Curve,
    TransportInstabilityError,
    assemble_compatible,
    compatibility_residual,
    flat_connection,
    levi_civita,
    parallel_transport,
    transport_drift,
)
from .metrics import fibonacci_directions
from .report import envelope, indicatrix_mesh, write_json, write_obj, write_points_csv

log = logging.getLogger("finsler_lab")

EXIT_OK, EXIT_CONFIG, EXIT_INCONSISTENT = 0, 1, 2
LOG_ENV = "FINSLER_LAB_LOG_LEVEL"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _outdir(args, cfg: RunConfig) -> Path:
    return Path(args.out or cfg.data["output"]["dir"])


def cmd_analyze(cfg: RunConfig, out: Path) -> int:
    rep = classify(cfg.metric, cfg.points, cfg.rule, cfg.scheme, cfg.tolerances)
    body = rep.to_json()
    write_json(envelope("analyze", cfg.to_dict(), body), out / "analyze_report.json")
    write_points_csv(body["points"], out / "analyze_points.csv")
    log.info("verdict %s", rep.verdict.value)
    return EXIT_INCONSISTENT if rep.verdict is Verdict.INCONSISTENT else EXIT_OK


def cmd_classify(cfg: RunConfig, out: Path) -> int:
    rep = classify(cfg.metric, cfg.points, cfg.rule, cfg.scheme, cfg.tolerances, beta=cfg.beta)
    body = rep.to_json()
    killing = [p["killing"] for p in body["points"] if p.get("killing")]
    verdict = {"verdict": body["verdict"], "reasons": body["reasons"], "summary": body["summary"]}
    if killing:
        verdict["killing"] = killing
    write_json(envelope("classify", cfg.to_dict(), verdict), out / "classify_verdict.json")
    log.info("verdict %s", rep.verdict.value)
    return EXIT_INCONSISTENT if rep.verdict is Verdict.INCONSISTENT else EXIT_OK


def _connection(cfg: RunConfig):
    kind = cfg.data["connection"]["kind"]
    gamma = AveragedMetricField(cfg.metric, cfg.rule, cfg.scheme)
    if kind == "flat":
        return flat_connection(), None, gamma
    if kind == "levi-civita":
        return levi_civita(gamma, cfg.scheme), 0.0, gamma
    f = cfg.data["connection"]["f"]
    if f is None:
        fs = [recover_f(cfg.metric, p, cfg.rule, cfg.scheme, gamma, cfg.tolerances.riemannian_threshold).f for p in cfg.points]
        f = float(np.mean([x for x in fs if x is not None])) if any(x is not None for x in fs) else 0.0
    return assemble_compatible(gamma, float(f), cfg.scheme), float(f), gamma


def _loops(cfg: RunConfig):
    tr = cfg.data["transport"]
    rng = np.random.default_rng(cfg.data["sample"]["seed"])
    for _ in range(int(tr["loops"])):
        center = cfg.points[rng.integers(len(cfg.points))]
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        v0 = rng.normal(size=3)
        yield Curve.circle(center, float(tr["radius"]), q[:, 0], q[:, 1]), v0 / np.linalg.norm(v0)


def cmd_verify_connection(cfg: RunConfig, out: Path) -> int:
    conn, f, _ = _connection(cfg)
    dirs = fibonacci_directions(64)
    rows = []
    for p in cfg.points:
        res = compatibility_residual(cfg.metric, conn, p, dirs, cfg.scheme)
        rows.append({"point": p.tolist(), "compatibility_residual": float(np.max(np.abs(res)))})
    drifts = []
    steps, ttol = int(cfg.data["transport"]["steps"]), float(cfg.data["transport"]["tol"])
    for curve, v0 in _loops(cfg):
        try:
            tr = parallel_transport(conn, curve, v0, steps, ttol)
        except TransportInstabilityError as exc:
            raise ConfigError(f"transport: {exc}") from None
        drifts.append(
            {
                "center": curve.position(0.0).tolist(),
                "drift": transport_drift(cfg.metric, curve, tr),
                "drift_per_length": transport_drift(cfg.metric, curve, tr) / curve.length(),
                "steps": tr.steps,
                "halving_change": tr.halving_change,
                "closure": float(np.max(np.abs(tr.vector - v0))),
            }
        )
    tol = cfg.data["tolerances"]
    max_res = max(r["compatibility_residual"] for r in rows)
    max_drift = max((d["drift_per_length"] for d in drifts), default=0.0)
    ok = max_res <= tol["compatibility"] and max_drift <= tol["transport_drift"]
    body = {
        "connection": {"kind": cfg.data["connection"]["kind"], "f": f},
        "max_compatibility_residual": max_res,
        "max_drift_per_length": max_drift,
        "passed": ok,
        "points": rows,
        "loops": drifts,
    }
    write_json(envelope("verify-connection", cfg.to_dict(), body), out / "verify_connection.json")
    write_points_csv(rows, out / "verify_connection.csv", ["p1", "p2", "p3", "compatibility_residual"])
    return EXIT_OK if ok else EXIT_INCONSISTENT


def cmd_transport(cfg: RunConfig, out: Path) -> int:
    tr_cfg = cfg.data["transport"]
    conn, f, _ = _connection(cfg)
    if tr_cfg["curve"] == "segment":
        if tr_cfg["start"] is None or tr_cfg["end"] is None:
            raise ConfigError("transport.start and transport.end are required for a segment")
        curve = Curve.segment(tr_cfg["start"], tr_cfg["end"])
    else:
        center = tr_cfg["center"] if tr_cfg["center"] is not None else cfg.points[0]
        curve = Curve.circle(center, float(tr_cfg["radius"]), tr_cfg["axis1"], tr_cfg["axis2"])
    try:
        tr = parallel_transport(conn, curve, tr_cfg["vector"], int(tr_cfg["steps"]), float(tr_cfg["tol"]))
    except TransportInstabilityError as exc:
        raise ConfigError(f"transport: {exc}") from None
    drift = transport_drift(cfg.metric, curve, tr)
    body = {
        "connection": {"kind": cfg.data["connection"]["kind"], "f": f},
        "endpoint": tr.vector.tolist(),
        "steps": tr.steps,
        "halving_change": tr.halving_change,
        "drift": drift,
        "drift_per_length": drift / curve.length(),
        "path": tr.path.tolist(),
    }
    write_json(envelope("transport", cfg.to_dict(), body), out / "transport.json")
    return EXIT_OK if body["drift_per_length"] <= cfg.data["tolerances"]["transport_drift"] else EXIT_INCONSISTENT


def cmd_export_indicatrix(cfg: RunConfig, out: Path, point=None) -> int:
    p = point if point is not None else cfg.data["export"]["point"]
    if p is None:
        p = (0.5 * (cfg.metric.lo + cfg.metric.hi)).tolist()
    p = cfg.metric.check_point(np.asarray(p, dtype=float))
    verts, faces = indicatrix_mesh(cfg.metric, p, cfg.rule)
    write_obj(verts, faces, out / "indicatrix.obj", f"indicatrix of {cfg.metric.name} at {p.tolist()}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "verify-connection": cmd_verify_connection,
    "classify": cmd_classify,
    "export-indicatrix": cmd_export_indicatrix,
    "transport": cmd_transport,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finsler-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML or JSON run configuration")
        sp.add_argument("--out", help="output directory (default: output.dir from the config)")
        sp.add_argument("--n-theta", type=int, help="override quadrature.n_theta")
        sp.add_argument("--n-phi", type=int, help="override quadrature.n_phi")
        sp.add_argument("--seed", type=int, help="override sample.seed")
        if name == "export-indicatrix":
            sp.add_argument("--point", help="base point as 'x,y,z'")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.n_theta is not None:
        overrides["quadrature.n_theta"] = args.n_theta
    if args.n_phi is not None:
        overrides["quadrature.n_phi"] = args.n_phi
    if args.seed is not None:
        overrides["sample.seed"] = args.seed
    try:
        cfg = load_config(args.config, overrides)
        out = _outdir(args, cfg)
        if args.command == "export-indicatrix":
            point = None
            if args.point:
                try:
                    point = [float(x) for x in args.point.split(",")]
                except ValueError:
                    raise ConfigError(f"--point must be 'x,y,z', got {args.point!r}") from None
                if len(point) != 3:
                    raise ConfigError("--point needs three coordinates")
            return cmd_export_indicatrix(cfg, out, point)
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, ValueError) as exc:
        messages = getattr(exc, "messages", [str(exc)])
        for msg in messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
