"""Deterministic CSV/JSON/SVG output; floats are written with 17 significant digits."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float) or hasattr(v, "__float__"):
        return fmt_float(v)
    return str(v)


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError("row length does not match header")
        self.rows.append(tuple(values))

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(_cell(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def as_json_obj(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with 17-digit floats and non-finite floats as null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float) or (hasattr(obj, "__float__") and not isinstance(obj, str)):
        x = float(obj)
        return fmt_float(x) if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class SvgCanvas:
    """Minimal SVG 1.1 writer: polylines, polygons, point markers and labels."""

    def __init__(self, xlim: Sequence[float], ylim: Sequence[float],
                 width: int = 480, height: int = 480, margin: int = 30):
        self.xlim, self.ylim = (float(xlim[0]), float(xlim[1])), (float(ylim[0]), float(ylim[1]))
        self.width, self.height, self.margin = width, height, margin
        self.items: list[str] = []

    def _map(self, x: float, y: float) -> tuple[float, float]:
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        px = self.margin + (x - x0) / (x1 - x0) * w
        py = self.margin + (y1 - y) / (y1 - y0) * h
        return px, py

    def _pts(self, pts) -> str:
        out = []
        for x, y in pts:
            px, py = self._map(x, y)
            out.append(f"{px:.6f},{py:.6f}")
        return " ".join(out)

    def polyline(self, pts, stroke: str = "black", width: float = 1.0, cls: str = "curve") -> None:
        self.items.append(f'<polyline class="{cls}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{width}" points="{self._pts(pts)}"/>')

    def polygon(self, pts, stroke: str = "black", cls: str = "outline") -> None:
        self.items.append(f'<polygon class="{cls}" fill="none" stroke="{stroke}" '
                          f'points="{self._pts(pts)}"/>')

    def marker(self, x: float, y: float, r: float = 3.0, fill: str = "red", cls: str = "point") -> None:
        px, py = self._map(x, y)
        self.items.append(f'<circle class="{cls}" cx="{px:.6f}" cy="{py:.6f}" r="{r}" fill="{fill}"/>')

    def text(self, x: float, y: float, s: str, size: int = 11) -> None:
        px, py = self._map(x, y)
        self.items.append(f'<text x="{px:.6f}" y="{py:.6f}" font-size="{size}">{s}</text>')

    def to_string(self) -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, *self.items, "</svg>"]) + "\n"
