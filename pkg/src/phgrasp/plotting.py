"""Minimal standalone SVG line plots (no display server, no plotting library)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
WIDTH, HEIGHT = 720, 420
MARGIN = dict(left=70, right=20, top=40, bottom=55)


def nice_ticks(lo, hi, target=6):
    """Round tick positions covering ``[lo, hi]`` with steps of 1, 2 or 5 x 10^k."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("tick range must be finite")
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    stop = math.ceil(hi / step) * step
    count = int(round((stop - start) / step)) + 1
    return [start + i * step for i in range(count)]


def _fmt(v):
    return f"{v:.6g}" if abs(v) >= 1e-12 else "0"


def line_plot(series, title="", xlabel="", ylabel="", hlines=()):
    """Render series ``[(label, x, y), ...]`` to an SVG document string.

    ``hlines`` is a sequence of ``(label, y)`` dashed reference lines.
    Non-finite samples are dropped.
    """
    if not series:
        raise ValueError("nothing to plot")
    xs, ys = [], []
    clean = []
    for label, x, y in series:
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        ok = np.isfinite(x) & np.isfinite(y)
        clean.append((label, x[ok], y[ok]))
        xs.append(x[ok])
        ys.append(y[ok])
    xs = np.concatenate(xs)
    ys = np.concatenate(ys + [np.array([v for _, v in hlines], dtype=float)])
    if xs.size == 0:
        raise ValueError("no finite samples to plot")
    xt = nice_ticks(float(xs.min()), float(xs.max()))
    yt = nice_ticks(float(ys.min()), float(ys.max()))
    x0, x1, y0, y1 = xt[0], xt[-1], yt[0], yt[-1]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    for v in xt:
        out.append(f'<line x1="{px(v):.2f}" y1="{MARGIN["top"]}" x2="{px(v):.2f}" '
                   f'y2="{MARGIN["top"] + ph}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{px(v):.2f}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{_fmt(v)}</text>')
    for v in yt:
        out.append(f'<line x1="{MARGIN["left"]}" y1="{py(v):.2f}" x2="{MARGIN["left"] + pw}" '
                   f'y2="{py(v):.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{py(v) + 4:.2f}" '
                   f'text-anchor="end">{_fmt(v)}</text>')
    out.append(f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="black"/>')
    for _, v in hlines:
        out.append(f'<line x1="{MARGIN["left"]}" y1="{py(v):.2f}" x2="{MARGIN["left"] + pw}" '
                   f'y2="{py(v):.2f}" stroke="#555" stroke-dasharray="6,4"/>')
    for i, (label, x, y) in enumerate(clean):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{pts}"/>')
        ly = MARGIN["top"] + 16 + 16 * i
        lx = MARGIN["left"] + pw - 170
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly}">{escape(label)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">'
               f'{escape(title)}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {MARGIN["top"] + ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(path, series, **kw):
    with open(path, "w") as fh:
        fh.write(line_plot(series, **kw))
    return path


def run_plots(records, out_dir, stem):
    """Position and force figures for one or more runs.

    Returns:
        The two written paths ``(position, force)``.
    """
    out_dir = Path(out_dir)
    labels = [r.metadata.get("scenario", f"run{i}") for i, r in enumerate(records)]
    pos = [(lab, r.t, r.data["q"][:, 0]) for lab, r in zip(labels, records)]
    force = [(lab, r.t, r.data["f_e"][:, 0]) for lab, r in zip(labels, records)]
    f_d = records[0].metadata.get("f_d")
    q_f = records[0].metadata.get("q_f")
    p1 = write_plot(out_dir / f"{stem}_position.svg", pos, title="Grasping position",
                    xlabel="t [s]", ylabel="q [rad]",
                    hlines=[("q_f", q_f)] if q_f is not None else ())
    p2 = write_plot(out_dir / f"{stem}_force.svg", force, title="Grasping force",
                    xlabel="t [s]", ylabel="f_e [N]",
                    hlines=[("f_d", f_d)] if f_d is not None else ())
    return p1, p2
