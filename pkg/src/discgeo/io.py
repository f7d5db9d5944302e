"""CSV, JSON and SVG output.

The SVG writer is a pure function of CSV text, so re-plotting a written CSV
reproduces the accompanying SVG byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

SCHEMA_VERSION = "1"
TRAJ_HEADER = ("t", "x", "y", "theta", "h1", "h2", "h3")
MULTI_HEADER = ("curve", "s") + TRAJ_HEADER
COLORS = ("#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return format(float(v), ".17g")


def trajectory_csv(times: Sequence[float], states: np.ndarray) -> str:
    """Single curve; ``states`` rows are ``(x, y, theta, h1, h2, h3)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJ_HEADER)
    for t, s in zip(times, states):
        w.writerow([fmt(t)] + [fmt(v) for v in s])
    return buf.getvalue()


def multi_curve_csv(curves: Iterable[tuple[str, float | None, Sequence[float], np.ndarray]]) -> str:
    """Rows ``curve, s, t, x, y, theta, h1, h2, h3``; missing h's are blank."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MULTI_HEADER)
    for cid, s, times, states in curves:
        states = np.atleast_2d(states)
        for t, row in zip(times, states):
            vals = [fmt(v) for v in row] + [""] * (6 - len(row))
            w.writerow([cid, fmt(s), fmt(t)] + vals)
    return buf.getvalue()


def read_curves(text: str) -> dict[str, dict[str, np.ndarray]]:
    """Parse either CSV layout into ``{curve: {column: array}}``."""
    rows = list(csv.DictReader(io.StringIO(text)))
    curves: dict[str, dict[str, list]] = {}
    for r in rows:
        cid = r.get("curve") or "curve"
        cols = curves.setdefault(cid, {k: [] for k in TRAJ_HEADER})
        for k in TRAJ_HEADER:
            v = r.get(k, "")
            cols[k].append(float(v) if v not in ("", None) else math.nan)
    return {cid: {k: np.array(v) for k, v in cols.items()} for cid, cols in curves.items()}


def svg_from_csv(text: str, axes: tuple[str, str] = ("x", "y"), title: str = "") -> str:
    """Line plot of the chosen columns, one polyline per curve, fixed 600x600 viewBox."""
    curves = read_curves(text)
    ax, ay = axes
    size, pad = 600, 50
    xs = np.concatenate([c[ax] for c in curves.values()]) if curves else np.zeros(1)
    ys = np.concatenate([c[ay] for c in curves.values()]) if curves else np.zeros(1)
    xs, ys = xs[np.isfinite(xs)], ys[np.isfinite(ys)]
    x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
    y0, y1 = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 1, x1 + 1
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1, y1 + 1
    inner = size - 2 * pad

    def px(v):
        return pad + (v - x0) / (x1 - x0) * inner

    def py(v):
        return size - pad - (v - y0) / (y1 - y0) * inner

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        f'<rect x="{pad}" y="{pad}" width="{inner}" height="{inner}" fill="none" stroke="black"/>',
        f'<text x="{size / 2:.1f}" y="{size - 12}" text-anchor="middle" font-size="14">{ax}</text>',
        f'<text x="14" y="{size / 2:.1f}" text-anchor="middle" font-size="14" transform="rotate(-90 14 {size / 2:.1f})">{ay}</text>',
        f'<text x="{pad}" y="{size - pad + 16}" font-size="11">{x0:.4g}</text>',
        f'<text x="{size - pad}" y="{size - pad + 16}" font-size="11" text-anchor="end">{x1:.4g}</text>',
        f'<text x="{pad - 4}" y="{size - pad}" font-size="11" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{pad - 4}" y="{pad + 10}" font-size="11" text-anchor="end">{y1:.4g}</text>',
    ]
    if title:
        out.append(f'<text x="{size / 2:.1f}" y="30" text-anchor="middle" font-size="16">{_esc(title)}</text>')
    for k, (cid, c) in enumerate(curves.items()):
        color = COLORS[k % len(COLORS)]
        mask = np.isfinite(c[ax]) & np.isfinite(c[ay])
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(c[ax][mask], c[ay][mask]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = pad + 18 + 16 * k
        out.append(f'<line x1="{size - pad - 110}" y1="{ly - 4}" x2="{size - pad - 90}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{size - pad - 85}" y="{ly}" font-size="12">{_esc(cid)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def json_report(payload: Mapping) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **_jsonable(payload)}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p
