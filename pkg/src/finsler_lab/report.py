"""Deterministic JSON/CSV reports and indicatrix meshes."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .metrics import FinslerMetric
from .quadrature import SphericalQuadratureRule, indicatrix_point

SCHEMA_VERSION = 1


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if hasattr(obj, "value"):  # enums
        return obj.value
    return obj


def envelope(command: str, config: dict, body: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "finsler_lab", "version": __version__},
        "command": command,
        "config": config,
        **body,
    }


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def write_json(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report))
    return path


POINT_COLUMNS = ["p1", "p2", "p3", "sigma", "sigma_relative", "f", "degenerate", "consistency", "curvature_norm", "levi_civita_curvature_norm"]


def write_points_csv(points: list[dict], path, columns=POINT_COLUMNS) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(columns)
        for rec in points:
            row = []
            for col in columns:
                if col in ("p1", "p2", "p3"):
                    val = rec["point"][int(col[1]) - 1]
                else:
                    val = rec.get(col)
                row.append("" if val is None else repr(_plain(val)))
            wr.writerow(row)
    return path


def indicatrix_mesh(metric: FinslerMetric, p, rule: SphericalQuadratureRule | None = None):
    """Vertices on the indicatrix over the quadrature grid plus the two poles.

    Returns ``(vertices, faces)`` with zero-based triangle indices,
    outward oriented.
    """
    rule = rule or SphericalQuadratureRule()
    ct, phi = rule.grid()
    st = np.sqrt(1.0 - ct**2)
    dirs = [np.array([0.0, 0.0, -1.0])]
    for c, s in zip(ct, st):
        for ph in phi:
            dirs.append(np.array([s * np.cos(ph), s * np.sin(ph), c]))
    dirs.append(np.array([0.0, 0.0, 1.0]))
    verts = indicatrix_point(metric, p, np.array(dirs))
    nt, nph = len(ct), len(phi)
    idx = lambda k, l: 1 + k * nph + (l % nph)  # noqa: E731
    south, north = 0, 1 + nt * nph
    faces = []
    for l in range(nph):
        faces.append((south, idx(0, l + 1), idx(0, l)))
    for k in range(nt - 1):
        for l in range(nph):
            a, b, c, d = idx(k, l), idx(k, l + 1), idx(k + 1, l + 1), idx(k + 1, l)
            faces.append((a, b, c))
            faces.append((a, c, d))
    for l in range(nph):
        faces.append((north, idx(nt - 1, l), idx(nt - 1, l + 1)))
    return verts, np.array(faces, dtype=int)


def write_obj(vertices, faces, path, comment: str = "") -> Path:
    """Wavefront OBJ (``v x y z`` / ``f i j k``, one-based)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {comment}"] if comment else []
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in map(lambda v: map(float, v), vertices)]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in faces]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_obj(path):
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x) - 1 for x in parts[1:4]])
    return np.array(verts), np.array(faces, dtype=int)
