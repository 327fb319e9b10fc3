"""Reading constraint files and writing CSV, JSON and SVG outputs.

Every float is written with 17 significant digits so that a round trip
through text is exact, and files always use LF line endings.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .functionals import DualFunctional
from .solver import ConstraintSet


def fmt(x) -> str:
    """17 significant digits; integers stay integers."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _encode(obj, level: int = 0) -> str:
    pad = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, level + 1) for v in obj) + "\n" + "  " * level + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no literal for these
        if not math.isfinite(x):
            return json.dumps(fmt(x))
        return fmt(x)
    if isinstance(obj, (bool, np.bool_, int, np.integer)):
        return fmt(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, two-space indent, 17-digit floats."""
    return _encode(obj) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def functional_to_json(f: DualFunctional) -> list:
    return [{"w": w, "t": t} for w, t in f.terms]


def functional_from_json(terms) -> DualFunctional:
    try:
        return DualFunctional.from_terms([(float(d["w"]), float(d["t"])) for d in terms])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad functional {terms!r}: {exc}") from exc


def read_constraints(path) -> ConstraintSet:
    """Constraints from a ``site,target`` CSV or a ``{functionals, targets}`` JSON file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"constraint file {path} does not exist")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
            funcs = [functional_from_json(f) for f in doc["functionals"]]
            targets = [float(v) for v in doc["targets"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
        if len(funcs) != len(targets):
            raise ConfigurationError(f"{path}: {len(funcs)} functionals but {len(targets)} targets")
        return ConstraintSet(tuple(funcs), tuple(targets))
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["site", "target"]:
        raise ConfigurationError(f"{path}: expected header 'site,target'")
    sites, targets = [], []
    for n, row in enumerate(reader, start=2):
        try:
            sites.append(float(row["site"]))
            targets.append(float(row["target"]))
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{path}, line {n}: {exc}") from exc
    if not sites:
        raise ConfigurationError(f"{path}: no constraints")
    return ConstraintSet.from_points(sites, targets)


def svg_polyline(path, x, y, title: str = "", width: int = 640, height: int = 400) -> None:
    """Single-curve plot as a bare SVG polyline."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pad = 40.0
    x0, x1 = float(np.min(x)), float(np.max(x))
    y0, y1 = float(np.min(y)), float(np.max(y))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    px = pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
    py = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#999"/>',
        f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1.5" points="{pts}"/>',
        f'<text x="{pad}" y="{pad - 12}" font-family="sans-serif" font-size="13">{title}</text>',
        f'<text x="{pad}" y="{height - 12}" font-family="sans-serif" font-size="11">'
        f"x in [{x0:.4g}, {x1:.4g}], y in [{y0:.4g}, {y1:.4g}]</text>",
        "</svg>",
    ]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def svg_heat(path, i, j, values, title: str = "", cell: int = 10) -> None:
    """Heat table of a triangular grid field as SVG rectangles."""
    i = np.asarray(i)
    j = np.asarray(j)
    v = np.asarray(values, dtype=float)
    n = int(max(i.max(), j.max()))
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    pad = 30
    size = (n + 1) * cell + 2 * pad
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             f'<text x="{pad}" y="{pad - 10}" font-family="sans-serif" font-size="13">{title}</text>']
    for a, b, val in zip(i.tolist(), j.tolist(), v.tolist()):
        s = (val - lo) / span
        r, g, bl = int(255 * s), int(80 + 100 * (1 - abs(2 * s - 1))), int(255 * (1 - s))
        lines.append(f'<rect x="{pad + a * cell}" y="{pad + (n - b) * cell}" width="{cell}" height="{cell}" '
                     f'fill="rgb({r},{g},{bl})"/>')
    lines.append("</svg>")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
