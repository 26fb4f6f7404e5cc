"""Minimal SVG charts so reports can be eyeballed without a plotting stack."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

W, H, PAD = 640, 360, 48
COLORS = ("#2a9d3c", "#d62828", "#1d3557", "#f4a261")


def _frame(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
    ]


def line_chart(series: Mapping[str, Sequence[float]], title: str, path: str | Path) -> None:
    """One polyline per named series, x = index."""
    ys = [v for s in series.values() for v in s]
    lo, hi = min(ys), max(ys)
    hi = hi if hi > lo else lo + 1.0
    n = max(len(s) for s in series.values())
    sx = (W - 2 * PAD) / max(n - 1, 1)
    sy = (H - 2 * PAD) / (hi - lo)
    out = _frame(title)
    out.append(f'<text x="{PAD - 4}" y="{PAD}" text-anchor="end" font-size="10">{hi:.3g}</text>')
    out.append(f'<text x="{PAD - 4}" y="{H - PAD}" text-anchor="end" font-size="10">{lo:.3g}</text>')
    out.append(f'<text x="{W - PAD}" y="{H - PAD + 14}" text-anchor="end" font-size="10">{n - 1}</text>')
    for k, (name, s) in enumerate(series.items()):
        c = COLORS[k % len(COLORS)]
        pts = " ".join(f"{PAD + i * sx:.2f},{H - PAD - (v - lo) * sy:.2f}" for i, v in enumerate(s))
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="2" points="{pts}"/>')
        out.append(f'<text x="{W - PAD}" y="{PAD + 14 * k}" text-anchor="end" fill="{c}" font-size="12">{escape(name)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def grouped_bars(
    groups: Sequence[str], series: Mapping[str, Sequence[float]], title: str, path: str | Path
) -> None:
    """Bars per group, one colour per series (e.g. same vs different tree)."""
    hi = max(max(s) for s in series.values()) or 1.0
    gw = (W - 2 * PAD) / len(groups)
    bw = gw * 0.8 / len(series)
    out = _frame(title)
    for g, name in enumerate(groups):
        x0 = PAD + g * gw + gw * 0.1
        for k, s in enumerate(series.values()):
            h = (H - 2 * PAD) * s[g] / hi
            out.append(
                f'<rect x="{x0 + k * bw:.2f}" y="{H - PAD - h:.2f}" width="{bw:.2f}" '
                f'height="{h:.2f}" fill="{COLORS[k % len(COLORS)]}"/>'
            )
        out.append(
            f'<text x="{x0 + gw * 0.4:.2f}" y="{H - PAD + 12}" text-anchor="middle" '
            f'font-size="8">{escape(name)}</text>'
        )
    for k, name in enumerate(series):
        out.append(f'<text x="{W - PAD}" y="{PAD + 14 * k}" text-anchor="end" fill="{COLORS[k]}" font-size="12">{escape(name)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
