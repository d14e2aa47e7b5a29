"""Static SVG rendering of Bloch-sphere point clouds (no plotting dependency)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

SIZE = 360
RADIUS = 150


def project(xyz, azimuth=math.radians(-60), elevation=math.radians(20)):
    """Orthographic projection onto screen ``(u, v, depth)``; ``v`` points up."""
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    x, y, z = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    ca, sa = math.cos(azimuth), math.sin(azimuth)
    ce, se = math.cos(elevation), math.sin(elevation)
    u = -x * sa + y * ca
    depth = x * ca + y * sa
    v = z * ce - depth * se
    return np.column_stack([u, v, depth * ce + z * se])


def _screen(uv):
    c = SIZE / 2
    return c + RADIUS * uv[:, 0], c - RADIUS * uv[:, 1]


def _polyline(points, **attrs):
    sx, sy = _screen(project(points))
    coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))
    extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<polyline points="{coords}" fill="none" {extra}/>'


def bloch_svg(records, title="") -> str:
    """SVG document for rows ``(label, x, y, z)``.

    Pulsars (label 1) are red discs, non-pulsars black rings; points on the
    far hemisphere are drawn faded and first.
    """
    records = np.atleast_2d(np.asarray(records, dtype=float)).reshape(-1, 4)
    t = np.linspace(0, 2 * np.pi, 121)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE + 24}" '
        f'viewBox="0 0 {SIZE} {SIZE + 24}">',
        f'<rect width="100%" height="100%" fill="white"/>',
        f'<circle cx="{SIZE / 2}" cy="{SIZE / 2}" r="{RADIUS}" fill="none" stroke="#999" stroke-width="1"/>',
        _polyline(np.column_stack([np.cos(t), np.sin(t), 0 * t]), stroke="#bbb", stroke_dasharray="3,3"),
        _polyline(np.column_stack([0 * t, np.cos(t), np.sin(t)]), stroke="#ddd", stroke_dasharray="2,4"),
    ]
    for label, tip in (("|0>", (0, 0, 1.12)), ("|1>", (0, 0, -1.18))):
        sx, sy = _screen(project(tip))
        parts.append(
            f'<text x="{sx[0]:.1f}" y="{sy[0]:.1f}" font-family="sans-serif" font-size="12" '
            f'text-anchor="middle">{escape(label)}</text>'
        )
    if len(records):
        proj = project(records[:, 1:4])
        sx, sy = _screen(proj)
        order = np.argsort(proj[:, 2], kind="stable")
        for i in order:
            opacity = 0.35 if proj[i, 2] < 0 else 0.9
            if records[i, 0] >= 0.5:
                parts.append(
                    f'<circle cx="{sx[i]:.2f}" cy="{sy[i]:.2f}" r="2.6" fill="#d62728" fill-opacity="{opacity}"/>'
                )
            else:
                parts.append(
                    f'<circle cx="{sx[i]:.2f}" cy="{sy[i]:.2f}" r="2.4" fill="none" stroke="black" '
                    f'stroke-width="0.8" stroke-opacity="{opacity}"/>'
                )
    if title:
        parts.append(
            f'<text x="{SIZE / 2}" y="{SIZE + 16}" font-family="sans-serif" font-size="13" '
            f'text-anchor="middle">{escape(title)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_bloch_svg(path, records, title="") -> Path:
    path = Path(path)
    path.write_text(bloch_svg(records, title))
    return path
