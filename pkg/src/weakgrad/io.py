"""
CSV, JSON and SVG output.

Floats are written so they read back bit for bit: ``%.17g`` in CSV and the
shortest round-trip repr in JSON.  SVG plots are plain polylines on
log-log axes.
"""

import csv
import json
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = [
    "format_float",
    "write_csv",
    "write_tail_csv",
    "write_directional_csv",
    "dumps_json",
    "write_json",
    "svg_loglog",
    "write_svg",
]


def format_float(x):
    return "%.17g" % float(x)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) for v in row])
    return path


def write_tail_csv(path, profile):
    return write_csv(path, ["s", "mu_hat", "ci_halfwidth", "s_mu"], profile.rows())


def write_directional_csv(path, profile):
    return write_csv(path, ["eps", "value", "ci_halfwidth"], profile.rows())


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps_json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.write_text(dumps_json(obj))
    return path


def _ticks(lo, hi):
    return [10.0 ** k for k in range(math.floor(lo), math.ceil(hi) + 1) if lo - 1e-9 <= k <= hi + 1e-9]


def svg_loglog(series, title="", xlabel="", ylabel="", reference=None,
               width=640, height=420):
    """
    Log-log line plot as an SVG string.

    ``series`` is a list of (label, x, y); non-positive points are dropped.
    ``reference`` optionally draws a dashed horizontal line at that y.
    """
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    left, right, top, bottom = 70, 20, 40, 50
    pts = []
    for label, x, y in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
        pts.append((label, np.log10(x[ok]), np.log10(y[ok])))
    allx = np.concatenate([p[1] for p in pts]) if pts else np.empty(0)
    ally = np.concatenate([p[2] for p in pts]) if pts else np.empty(0)
    if reference is not None and reference > 0:
        ally = np.append(ally, math.log10(reference))
    if allx.size == 0:
        allx = np.array([0.0, 1.0])
    if ally.size == 0:
        ally = np.array([0.0, 1.0])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = max(0.05 * (y1 - y0), 0.05)
    y0, y1 = y0 - pad, y1 + pad
    pw, ph = width - left - right, height - top - bottom

    def X(v):
        return left + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        xv = X(math.log10(t))
        out.append(f'<line x1="{xv:.2f}" y1="{top + ph}" x2="{xv:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{xv:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        yv = Y(math.log10(t))
        out.append(f'<line x1="{left - 5}" y1="{yv:.2f}" x2="{left}" y2="{yv:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{yv + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    if reference is not None and reference > 0:
        yv = Y(math.log10(reference))
        out.append(f'<line x1="{left}" y1="{yv:.2f}" x2="{left + pw}" y2="{yv:.2f}" '
                   f'stroke="gray" stroke-dasharray="6,4"/>')
    for k, (label, lx, ly) in enumerate(pts):
        c = colors[k % len(colors)]
        if lx.size:
            coords = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(lx, ly))
            out.append(f'<polyline points="{coords}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        out.append(f'<text x="{left + 10}" y="{top + 16 + 14 * k}" fill="{c}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, svg):
    path = Path(path)
    path.write_text(svg)
    return path
