"""Minimal static SVG line plots.

Output is deterministic: the same input always yields the same bytes, so
plots can be diffed alongside the CSV tables they illustrate.
"""

from dataclasses import dataclass
import math
from xml.sax.saxutils import escape

import numpy as np

from .exceptions import DomainError, EmptySeries, ValidationError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class Axes:
    """Axis scales and labels for :func:`emit_svg`."""

    xlog: bool = False
    ylog: bool = False
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    width: int = 640
    height: int = 400


@dataclass(frozen=True)
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""


def _as_series(item):
    if isinstance(item, Series):
        x, y, label = item.x, item.y, item.label
    elif len(item) == 3:
        x, y, label = item
    else:
        (x, y), label = item, ""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValidationError("x and y of a curve must have equal length", "series")
    return Series(x, y, str(label))


def _transform(values, log, name):
    if not log:
        return values
    finite = values[np.isfinite(values)]
    if np.any(finite <= 0):
        raise DomainError(f"log {name} axis needs positive values")
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log10(values)


def _ticks(lo, hi, log):
    if log:
        first, last = math.ceil(lo - 1e-9), math.floor(hi + 1e-9)
        if last - first >= 1:
            step = max(1, math.ceil((last - first) / 8))
            return [float(v) for v in range(first, last + 1, step)]
    span = hi - lo
    raw = span / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _tick_label(v, log):
    if log:
        return f"1e{v:g}" if float(v).is_integer() else format(10 ** v, ".3g")
    return format(v, ".4g")


def _range(values):
    lo, hi = float(values.min()), float(values.max())
    if hi - lo < 1e-12 * max(1.0, abs(lo)):
        pad = max(abs(lo) * 0.05, 0.5)
        return lo - pad, hi + pad
    return lo, hi


def emit_svg(series, axes=None):
    """Render curves as a standalone SVG 1.1 document.

    Parameters
    ----------
    series : list
        Curves given as ``(x, y)``, ``(x, y, label)`` or :class:`Series`.
        Non-finite points are skipped.
    axes : Axes, optional

    Returns
    -------
    str

    Raises
    ------
    EmptySeries
        If there is no curve with at least one finite point.
    DomainError
        If a log axis receives a non-positive value.
    """
    axes = axes or Axes()
    curves = [_as_series(item) for item in series]
    plotted = []
    for c in curves:
        x = _transform(c.x, axes.xlog, "x")
        y = _transform(c.y, axes.ylog, "y")
        keep = np.isfinite(x) & np.isfinite(y)
        if keep.any():
            plotted.append((x[keep], y[keep], c.label))
    if not plotted:
        raise EmptySeries("nothing to plot")

    xlo, xhi = _range(np.concatenate([p[0] for p in plotted]))
    ylo, yhi = _range(np.concatenate([p[1] for p in plotted]))
    W, H = axes.width, axes.height
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = W - left - right, H - top - bottom

    def px(v):
        return left + (v - xlo) / (xhi - xlo) * pw

    def py(v):
        return top + (yhi - v) / (yhi - ylo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(xlo, xhi, axes.xlog):
        x = px(v)
        out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" font-size="11" '
                   f'text-anchor="middle">{_tick_label(v, axes.xlog)}</text>')
    for v in _ticks(ylo, yhi, axes.ylog):
        y = py(v)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{_tick_label(v, axes.ylog)}</text>')
    if axes.title:
        out.append(f'<text x="{W / 2:.1f}" y="22" font-size="14" '
                   f'text-anchor="middle">{escape(axes.title)}</text>')
    if axes.xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 10}" font-size="12" '
                   f'text-anchor="middle">{escape(axes.xlabel)}</text>')
    if axes.ylabel:
        out.append(f'<text x="16" y="{top + ph / 2:.1f}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(axes.ylabel)}</text>')

    for i, (x, y, label) in enumerate(plotted):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if label:
            ly = top + 14 + 14 * i
            out.append(f'<text x="{left + pw - 6}" y="{ly}" font-size="11" fill="{color}" '
                       f'text-anchor="end">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
