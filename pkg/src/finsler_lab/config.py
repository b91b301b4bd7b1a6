"""Run configuration: YAML (or JSON) in, fully resolved dictionary out.

The resolved dictionary is echoed into every report; loading the echo
reproduces the run.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import yaml

from .classification import Tolerances
from .kernel import DiffScheme
from .killing import make_vector_field
from .metrics import METRIC_NAMES, ConfigurationError, FinslerMetric, lattice_points, make_metric
from .quadrature import SphericalQuadratureRule


class ConfigError(ValueError):
    def __init__(self, messages):
        self.messages = [messages] if isinstance(messages, str) else list(messages)
        super().__init__("; ".join(self.messages))


DEFAULTS = {
    "manifold": {"metric": "euclidean", "params": {}, "chart": None},
    "killing": None,
    "quadrature": {"n_theta": 32, "n_phi": 64},
    "differentiation": {"h_base": 5e-3, "h_fiber": 2e-3, "order": 4},
    "sample": {"lattice": [2, 2, 2], "lo": None, "hi": None, "random": 0, "seed": 0},
    "tolerances": {
        **{f.name: f.default for f in fields(Tolerances)},
        "compatibility": 1e-4,
        "transport_drift": 1e-5,
    },
    "connection": {"kind": "cross-product", "f": None},
    "transport": {
        "curve": "loop",
        "center": None,
        "radius": 0.05,
        "axis1": [1.0, 0.0, 0.0],
        "axis2": [0.0, 1.0, 0.0],
        "start": None,
        "end": None,
        "vector": [1.0, 0.0, 0.0],
        "steps": 8,
        "tol": 1e-8,
        "loops": 2,
    },
    "export": {"point": None},
    "output": {"dir": "out"},
}

_SECTIONS = set(DEFAULTS)


def _merge(base, override, path, errors):
    if override is None:
        return base
    if not isinstance(override, dict):
        errors.append(f"{path or 'config'} must be a mapping")
        return base
    out = copy.deepcopy(base) if isinstance(base, dict) else {}
    for key, val in override.items():
        if isinstance(base, dict) and key not in base and path not in ("manifold.params", "killing.params"):
            errors.append(f"unknown key {path + '.' if path else ''}{key}")
            continue
        sub = base.get(key) if isinstance(base, dict) else None
        if isinstance(sub, dict) and isinstance(val, dict) and key != "params":
            out[key] = _merge(sub, val, f"{path}.{key}" if path else key, errors)
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass
class RunConfig:
    data: dict
    metric: FinslerMetric
    rule: SphericalQuadratureRule
    scheme: DiffScheme
    tolerances: Tolerances
    points: np.ndarray
    beta: object | None

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)


def resolve(raw: dict | None) -> RunConfig:
    """Merge defaults, validate and build the run objects."""
    errors: list[str] = []
    data = _merge(DEFAULTS, raw or {}, "", errors)
    if errors:
        raise ConfigError(errors)

    man = data["manifold"]
    if man.get("metric") not in METRIC_NAMES:
        errors.append(f"manifold.metric must be one of {', '.join(METRIC_NAMES)}, got {man.get('metric')!r}")
        raise ConfigError(errors)
    chart = man.get("chart") or {}
    try:
        metric = make_metric(man["metric"], lo=chart.get("lo"), hi=chart.get("hi"), **copy.deepcopy(man.get("params") or {}))
    except (ConfigurationError, TypeError, ValueError) as exc:
        raise ConfigError(f"manifold: {exc}") from None
    man["chart"] = {"lo": metric.lo.tolist(), "hi": metric.hi.tolist()}

    q = data["quadrature"]
    try:
        rule = SphericalQuadratureRule(int(q["n_theta"]), int(q["n_phi"]))
    except (TypeError, ValueError) as exc:
        errors.append(f"quadrature: {exc}")
    d = data["differentiation"]
    try:
        scheme = DiffScheme(float(d["h_base"]), float(d["h_fiber"]), int(d["order"]))
    except (TypeError, ValueError) as exc:
        errors.append(f"differentiation: {exc}")
    t = data["tolerances"]
    try:
        tol = Tolerances(**{f.name: float(t[f.name]) for f in fields(Tolerances)})
        float(t["compatibility"]), float(t["transport_drift"])
    except (TypeError, ValueError) as exc:
        errors.append(f"tolerances: {exc}")

    s = data["sample"]
    mid = 0.5 * (metric.lo + metric.hi)
    half = 0.25 * (metric.hi - metric.lo)
    s["lo"] = list(map(float, s["lo"] if s["lo"] is not None else mid - half))
    s["hi"] = list(map(float, s["hi"] if s["hi"] is not None else mid + half))
    lat = s["lattice"]
    if not (isinstance(lat, list) and len(lat) == 3 and all(isinstance(n, int) and n >= 1 for n in lat)):
        errors.append("sample.lattice must be three positive integers")
    if not (isinstance(s["random"], int) and s["random"] >= 0):
        errors.append("sample.random must be a non-negative integer")
    if not isinstance(s["seed"], int):
        errors.append("sample.seed must be an integer")
    if not (metric.in_domain(s["lo"]) and metric.in_domain(s["hi"])):
        errors.append("sample box must lie inside the chart")
    conn = data["connection"]
    if conn["kind"] not in ("cross-product", "flat", "levi-civita"):
        errors.append("connection.kind must be cross-product, flat or levi-civita")
    if conn["f"] is not None and not isinstance(conn["f"], (int, float)):
        errors.append("connection.f must be a number or null")
    if data["transport"]["curve"] not in ("loop", "segment"):
        errors.append("transport.curve must be loop or segment")
    if errors:
        raise ConfigError(errors)

    points = lattice_points(s["lo"], s["hi"], lat)
    if s["random"]:
        rng = np.random.default_rng(s["seed"])
        extra = rng.uniform(s["lo"], s["hi"], size=(s["random"], 3))
        points = np.vstack([points, extra])

    beta = None
    if data["killing"] is not None:
        k = data["killing"]
        if not isinstance(k, dict) or "field" not in k:
            raise ConfigError("killing must be a mapping with a 'field' name")
        k.setdefault("params", {})
        try:
            beta = make_vector_field(k["field"], **k["params"])
        except ConfigurationError as exc:
            raise ConfigError(f"killing: {exc}") from None
    return RunConfig(data, metric, rule, scheme, tol, points, beta)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from None
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    for dotted, value in (overrides or {}).items():
        section, key = dotted.split(".")
        raw.setdefault(section, {})
        if raw[section] is None:
            raw[section] = {}
        raw[section][key] = value
    return resolve(raw)
