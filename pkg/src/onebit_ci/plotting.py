"""Minimal standalone SVG line plot (BER vs SNR, log-scale y)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def ber_svg(series, xlabel="SNR (dB)", ylabel="BER", title=""):
    """Render ``{name: [(x, ber), ...]}`` as an SVG document string.

    Points with BER 0 are dropped (they have no place on a log axis).
    """
    W, H, L, R, T, B = 640, 440, 70, 150, 40, 50
    pts = {k: [(x, y) for x, y in v if y > 0 and math.isfinite(y)] for k, v in series.items()}
    xs = [x for v in series.values() for x, _ in v] or [0.0, 1.0]
    ys = [y for v in pts.values() for _, y in v] or [1e-3, 1.0]
    x0, x1 = min(xs), max(xs)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    d0 = math.floor(math.log10(min(ys)))
    d1 = max(math.ceil(math.log10(max(ys))), d0 + 1)

    def px(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def py(y):
        return T + (d1 - math.log10(y)) / (d1 - d0) * (H - T - B)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{L}" y="{T}" width="{W - L - R}" height="{H - T - B}" fill="none" stroke="black"/>',
    ]
    for d in range(d0, d1 + 1):
        y = py(10.0**d)
        out.append(f'<line x1="{L}" y1="{y:.1f}" x2="{W - R}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{L - 6}" y="{y + 4:.1f}" text-anchor="end">1e{d}</text>')
    for x in sorted(set(xs)):
        out.append(f'<text x="{px(x):.1f}" y="{H - B + 16}" text-anchor="middle">{x:g}</text>')
    out.append(f'<text x="{(L + W - R) / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{(T + H - B) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(T + H - B) / 2})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{(L + W - R) / 2}" y="24" text-anchor="middle">{escape(title)}</text>')
    for i, (name, v) in enumerate(pts.items()):
        color = _COLORS[i % len(_COLORS)]
        if v:
            path = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in v)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
            out.extend(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="{color}"/>' for x, y in v)
        ly = T + 16 + 18 * i
        out.append(f'<line x1="{W - R + 10}" y1="{ly}" x2="{W - R + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - R + 36}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
