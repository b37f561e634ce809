"""Minimal SVG line charts; output is deterministic for identical input."""

from __future__ import annotations

import math
from html import escape
from typing import Sequence

import numpy as np

DESIRED = "#1f77b4"
ACTUAL = "#d62728"
ERROR = "#2ca02c"
MAX_POINTS = 2000


def _nice_step(span: float, target: int = 5) -> float:
    raw = span / max(target, 1)
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step - 1e-9) * step
    out, v = [], first
    while v <= hi + 1e-9 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _limits(arrays) -> tuple[float, float]:
    vals = np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return -1.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        pad = max(abs(hi) * 0.1, 1e-3)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _thin(x: np.ndarray, y: np.ndarray):
    if len(x) <= MAX_POINTS:
        return x, y
    idx = np.unique(np.linspace(0, len(x) - 1, MAX_POINTS).round().astype(int))
    return x[idx], y[idx]


class Panel:
    """One set of axes drawn into a rectangle of the parent document."""

    def __init__(self, x0, y0, w, h, title="", xlabel="", ylabel=""):
        self.box = (x0, y0, w, h)
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.series = []

    def line(self, x, y, label, color, dash=None, width=1.5):
        self.series.append((np.asarray(x, float), np.asarray(y, float), label, color, dash, width))
        return self

    def render(self) -> list[str]:
        x0, y0, w, h = self.box
        ml, mr, mt, mb = 70, 20, 30, 45
        pw, ph = w - ml - mr, h - mt - mb
        xlo, xhi = _limits([s[0] for s in self.series])
        ylo, yhi = _limits([s[1] for s in self.series])

        def px(v):
            return x0 + ml + (v - xlo) / (xhi - xlo) * pw

        def py(v):
            return y0 + mt + (1 - (v - ylo) / (yhi - ylo)) * ph

        out = [f'<rect x="{x0 + ml:.1f}" y="{y0 + mt:.1f}" width="{pw:.1f}" height="{ph:.1f}" fill="white" stroke="#444"/>']
        for v in _ticks(xlo, xhi):
            X = px(v)
            out.append(f'<line x1="{X:.1f}" y1="{y0 + mt:.1f}" x2="{X:.1f}" y2="{y0 + mt + ph:.1f}" stroke="#ddd"/>')
            out.append(f'<text x="{X:.1f}" y="{y0 + mt + ph + 16:.1f}" text-anchor="middle" font-size="11">{_fmt(v)}</text>')
        for v in _ticks(ylo, yhi):
            Y = py(v)
            out.append(f'<line x1="{x0 + ml:.1f}" y1="{Y:.1f}" x2="{x0 + ml + pw:.1f}" y2="{Y:.1f}" stroke="#ddd"/>')
            out.append(f'<text x="{x0 + ml - 6:.1f}" y="{Y + 4:.1f}" text-anchor="end" font-size="11">{_fmt(v)}</text>')
        for x, y, label, color, dash, width in self.series:
            xs, ys = _thin(x, y)
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys) if math.isfinite(b))
            d = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{d} points="{pts}"/>')
        for i, (_, _, label, color, dash, _) in enumerate(self.series):
            ly = y0 + mt + 14 + 16 * i
            lx = x0 + ml + pw - 150
            d = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<line x1="{lx:.1f}" y1="{ly - 4:.1f}" x2="{lx + 24:.1f}" y2="{ly - 4:.1f}" stroke="{color}" stroke-width="2"{d}/>')
            out.append(f'<text x="{lx + 30:.1f}" y="{ly:.1f}" font-size="11">{escape(label)}</text>')
        out.append(f'<text x="{x0 + ml + pw / 2:.1f}" y="{y0 + 18:.1f}" text-anchor="middle" font-size="14">{escape(self.title)}</text>')
        out.append(f'<text x="{x0 + ml + pw / 2:.1f}" y="{y0 + h - 8:.1f}" text-anchor="middle" font-size="12">{escape(self.xlabel)}</text>')
        cx, cy = x0 + 16, y0 + mt + ph / 2
        out.append(f'<text x="{cx:.1f}" y="{cy:.1f}" text-anchor="middle" font-size="12" transform="rotate(-90 {cx:.1f} {cy:.1f})">{escape(self.ylabel)}</text>')
        return out


def document(width: int, height: int, parts: Sequence[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *parts, "</svg>"]) + "\n"


def tracking_figure(t, desired, actual, error, name: str, unit: str) -> str:
    """Desired vs obtained on top, tracking error below."""
    top = Panel(0, 0, 720, 300, f"{name}: desired and obtained", "t [s]", f"{name} [{unit}]")
    top.line(t, desired, "desired", DESIRED, dash="6,4").line(t, actual, "obtained", ACTUAL)
    bottom = Panel(0, 300, 720, 220, f"{name}: tracking error", "t [s]", f"error [{unit}]")
    bottom.line(t, error, "desired - obtained", ERROR)
    return document(720, 520, top.render() + bottom.render())


def projection_3d(desired: np.ndarray, actual: np.ndarray, title: str = "3-D trajectory") -> str:
    """Oblique projection of (x, y, z) paths plus the three plane views."""
    desired = np.asarray(desired, float)
    actual = np.asarray(actual, float)
    az, el = math.radians(-50.0), math.radians(25.0)

    def proj(p):
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        u = x * math.cos(az) - y * math.sin(az)
        v = (x * math.sin(az) + y * math.cos(az)) * math.sin(el) + z * math.cos(el)
        return u, v

    main = Panel(0, 0, 720, 460, title, "projected horizontal", "projected vertical")
    ud, vd = proj(desired)
    ua, va = proj(actual)
    main.line(ud, vd, "desired", DESIRED, dash="6,4").line(ua, va, "obtained", ACTUAL)
    views = []
    for i, (a, b, la, lb) in enumerate(((0, 1, "x", "y"), (0, 2, "x", "z"), (1, 2, "y", "z"))):
        p = Panel(240 * i, 460, 240, 240, f"{la}-{lb} plane", f"{la} [m]", f"{lb} [m]")
        p.line(desired[:, a], desired[:, b], "desired", DESIRED, dash="6,4")
        p.line(actual[:, a], actual[:, b], "obtained", ACTUAL)
        views.extend(p.render())
    return document(720, 700, main.render() + views)
