"""JSON job configuration: defaults, overrides and validation."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .geometry import CircleArc, NInterval, symmetric_ninterval


class ConfigError(ValueError):
    """Invalid configuration (exit code 2)."""


DEFAULT_INTERVALS = [[-2.0, -0.5], [0.5, 2.0]]

DEFAULTS: dict[str, Any] = {
    "intervals": None,
    "symmetric": None,
    "central_charge": 1.0,
    "epsilon": 1e-6,
    "grids": {
        "flow": {"t_min": -1.0, "t_max": 1.0, "t_points": 21, "seeds_per_component": 3},
        "orbit": {"start": None, "s_min": -1.0, "s_max": 1.0, "s_points": 101, "zoom": 100.0},
        "mixing": {"t_min": 0.0, "t_max": 1.0, "t_points": 11, "steps_per_unit": 10000,
                   "x0": None},
        "thermo": {"u_points": 50, "v_points": 50, "tau_points": 51},
        "kms": {"pairs": 20, "seed": 0, "zeta_range": 3.0},
        "fig1": {"n": 3, "arc": [0.0, math.pi], "t_min": -0.3, "t_max": 0.3, "t_points": 13,
                 "seeds_per_component": 4},
        "fig2": {"a": 0.5, "b": 2.0, "s_min": -1.0, "s_max": 1.0, "s_points": 201,
                 "zoom": 100.0, "start": None},
        "fig3": {"u": 2.0, "v": -0.4, "half_width": 0.1, "a": 0.25, "b": 4.0},
    },
    "verify": {"tolerance_factor": 1.0},
    "output": {"path": None, "format": "csv"},
}

_RESOLUTION_KEYS = {"t_points", "s_points", "u_points", "v_points", "tau_points"}
_FORMATS = ("csv", "json", "svg")


@dataclass
class JobConfig:
    E: NInterval
    symmetric: tuple[CircleArc, int] | None
    central_charge: float
    epsilon: float
    grids: dict[str, dict[str, Any]]
    tolerance_factor: float = 1.0
    out_path: str | None = None
    out_format: str = "csv"
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    def grid(self, name: str) -> dict[str, Any]:
        return self.grids[name]


def _merge(base: dict, extra: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key '{where}'")
        if isinstance(base[key], dict) and base[key] is not None:
            if not isinstance(val, dict):
                raise ConfigError(f"'{where}' must be an object")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def apply_override(doc: dict, assignment: str) -> None:
    """Set a dotted key from 'a.b.c=value'; the value is parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"override '{assignment}' is not of the form key=value")
    key, text = assignment.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    parts = key.strip().split(".")
    node = doc
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override inside non-object '{key}'")
    node[parts[-1]] = value


def _number(val, where: str, positive: bool = False) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"'{where}' must be a number")
    val = float(val)
    if math.isnan(val):
        raise ConfigError(f"'{where}' must not be NaN")
    if positive and not val > 0:
        raise ConfigError(f"'{where}' must be positive")
    return val


def _parse_region(doc: dict) -> tuple[NInterval, tuple[CircleArc, int] | None]:
    if doc["intervals"] is not None and doc["symmetric"] is not None:
        raise ConfigError("give either 'intervals' or 'symmetric', not both")
    if doc["symmetric"] is not None:
        sym = doc["symmetric"]
        if not isinstance(sym, dict) or set(sym) != {"n", "arc"}:
            raise ConfigError("'symmetric' needs exactly the keys 'n' and 'arc'")
        n = sym["n"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ConfigError("'symmetric.n' must be a positive integer")
        arc_v = sym["arc"]
        if not isinstance(arc_v, list) or len(arc_v) != 2:
            raise ConfigError("'symmetric.arc' must be [start, end] angles")
        try:
            arc = CircleArc(_number(arc_v[0], "symmetric.arc"), _number(arc_v[1], "symmetric.arc"))
            return symmetric_ninterval(arc, n), (arc, n)
        except ValueError as exc:
            raise ConfigError(f"invalid symmetric spec: {exc}") from exc
    pairs = doc["intervals"] if doc["intervals"] is not None else DEFAULT_INTERVALS
    if not isinstance(pairs, list) or not pairs:
        raise ConfigError("'intervals' must be a non-empty list of [a, b] pairs")
    clean = []
    for i, pr in enumerate(pairs):
        if not isinstance(pr, list) or len(pr) != 2:
            raise ConfigError(f"'intervals[{i}]' must be a pair [a, b]")
        clean.append((_number(pr[0], f"intervals[{i}]"), _number(pr[1], f"intervals[{i}]")))
    try:
        E = NInterval.from_pairs(clean)
    except ValueError as exc:
        raise ConfigError(f"invalid intervals: {exc}") from exc
    return E, E.symmetric_arc()


def _validate_grids(grids: dict) -> None:
    for name, g in grids.items():
        for key, val in g.items():
            where = f"grids.{name}.{key}"
            if key in _RESOLUTION_KEYS or key in ("pairs", "seeds_per_component", "steps_per_unit"):
                if isinstance(val, bool) or not isinstance(val, int):
                    raise ConfigError(f"'{where}' must be an integer")
                low = 2 if key in _RESOLUTION_KEYS else 1
                if val < low:
                    raise ConfigError(f"'{where}' must be at least {low}")
            elif key in ("start",):
                if val is not None and (not isinstance(val, list) or len(val) != 2):
                    raise ConfigError(f"'{where}' must be null or [t, x]")
                if val is not None:
                    for v in val:
                        _number(v, where)
            elif key == "arc":
                if not isinstance(val, list) or len(val) != 2:
                    raise ConfigError(f"'{where}' must be [start, end]")
                for v in val:
                    _number(v, where)
            elif key == "x0":
                if val is not None:
                    _number(val, where)
            elif key in ("seed", "n"):
                if isinstance(val, bool) or not isinstance(val, int) or val < (1 if key == "n" else 0):
                    raise ConfigError(f"'{where}' must be a non-negative integer")
            else:
                _number(val, where, positive=key in ("zoom", "zeta_range", "b"))
        for lo, hi in (("t_min", "t_max"), ("s_min", "s_max")):
            if lo in g and not g[lo] < g[hi]:
                raise ConfigError(f"'grids.{name}.{lo}' must be below '{hi}'")


def build_config(doc: dict | None = None, overrides: list[str] | None = None) -> JobConfig:
    doc = copy.deepcopy(doc or {})
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    for item in overrides or []:
        apply_override(doc, item)
    merged = _merge(DEFAULTS, doc)
    E, sym = _parse_region(merged)
    eps = _number(merged["epsilon"], "epsilon", positive=True)
    c = _number(merged["central_charge"], "central_charge", positive=True)
    _validate_grids(merged["grids"])
    fac = _number(merged["verify"]["tolerance_factor"], "verify.tolerance_factor", positive=True)
    fmt = merged["output"]["format"]
    if fmt not in _FORMATS:
        raise ConfigError(f"'output.format' must be one of {', '.join(_FORMATS)}")
    path = merged["output"]["path"]
    if path is not None and not isinstance(path, str):
        raise ConfigError("'output.path' must be a string or null")
    return JobConfig(E, sym, c, eps, merged["grids"], fac, path, fmt, merged)


def load_config(path: str | Path | None, overrides: list[str] | None = None) -> JobConfig:
    doc: dict = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return build_config(doc, overrides)
