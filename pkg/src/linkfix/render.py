"""Static SVG diagnostics of an analysis run.

The viewport is the bounding box of the orbit polygon padded by 10%, so a
given input always produces the same file.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .pipeline import Analysis, change_vertex_ids

__all__ = ["render_svg", "omega_color"]

_POSITIVE = ((255, 255, 255), (33, 102, 172))
_NEGATIVE = ((255, 255, 255), (178, 24, 43))


def omega_color(omega: int, scale: int) -> str:
    """Fill colour for a face: white at 0, deeper blue (positive) or red (negative) with |omega|."""
    lo, hi = _POSITIVE if omega >= 0 else _NEGATIVE
    t = 0.0 if scale == 0 else min(1.0, abs(omega) / scale)
    rgb = [round(a + (b - a) * (0.25 + 0.75 * t) if omega else a) for a, b in zip(lo, hi)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def render_svg(analysis: Analysis, width: int = 800) -> str:
    arr = analysis.arrangement
    gamma = analysis.problem.orbit.array()
    lo, hi = gamma.min(axis=0), gamma.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    pad = 0.1 * span
    lo, hi = lo - pad, hi + pad
    span = hi - lo
    height = max(1, round(width * span[1] / span[0]))
    unit = float(span[0]) / width  # world units per pixel

    def xy(p):
        # flip y so the picture has the usual mathematical orientation
        return _fmt(float(p[0])), _fmt(float(lo[1] + hi[1] - p[1]))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{_fmt(float(lo[0]))} {_fmt(float(lo[1]))} {_fmt(float(span[0]))} {_fmt(float(span[1]))}">',
        "<defs>",
        f'<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="{_fmt(14 * unit)}" '
        f'markerHeight="{_fmt(14 * unit)}" '
        'orient="auto" markerUnits="userSpaceOnUse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#222"/></marker>',
        "</defs>",
    ]

    by_id = {r.face: r for r in analysis.indices or []}
    bounded = arr.bounded_faces
    scale = max((abs(f.omega) for f in bounded), default=1) or 1
    out.append('<g id="faces" stroke="none">')
    for f in bounded:
        pts = " ".join(",".join(xy(p)) for p in arr.face_polygon(f))
        out.append(f'<polygon data-face="{f.id}" data-omega="{f.omega}" points="{pts}" '
                   f'fill="{omega_color(f.omega, scale)}"/>')
    out.append("</g>")

    out.append(f'<g id="gamma" stroke="#222" stroke-width="{_fmt(1.5 * unit)}" fill="none">')
    n = len(gamma)
    for i in range(n):
        a, b = gamma[i], gamma[(i + 1) % n]
        (x1, y1), (x2, y2) = xy(a), xy(b)
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" marker-end="url(#arrow)"/>')
    out.append("</g>")

    changes = sorted(change_vertex_ids(arr))
    out.append('<g id="orientation-changes" fill="#ff9900" stroke="none">')
    for v in changes:
        cx, cy = xy(arr.vertices[v])
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(3.5 * unit)}"/>')
    out.append("</g>")

    out.append('<g id="orbit" fill="#000" stroke="none">')
    for i, p in enumerate(gamma):
        cx, cy = xy(p)
        out.append(f'<circle data-orbit-index="{i}" cx="{cx}" cy="{cy}" r="{_fmt(4 * unit)}"/>')
    out.append("</g>")

    fs = _fmt(11 * unit)
    out.append(f'<g id="labels" font-family="sans-serif" font-size="{fs}" text-anchor="middle" fill="#000">')
    for f in bounded:
        if f.sample_point is None:
            continue
        cx, cy = xy(f.sample_point)
        r = by_id.get(f.id)
        ind = "?" if r is None else str(r.comb_index)
        out.append(f'<text class="face-label" data-face="{f.id}" x="{cx}" y="{cy}">'
                   f'{escape(f"ω={f.omega}, Ind={ind}")}</text>')
    out.append("</g>")

    fp = analysis.fixed_point
    if fp is not None:
        cx, cy = xy(fp.location)
        s = _fmt(6 * unit)
        out.append(f'<g id="fixed-point" stroke="#008000" stroke-width="{_fmt(2 * unit)}">'
                   f'<circle cx="{cx}" cy="{cy}" r="{s}" fill="none"/>'
                   f'<title>{escape(f"fixed point ({fp.location[0]:.10g}, {fp.location[1]:.10g})")}</title></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
