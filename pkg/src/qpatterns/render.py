"""Text and SVG renderings of outcome histograms and complex amplitudes.

Every renderer is a pure function of its input, so identical inputs give
byte-identical output.
"""
from __future__ import annotations

import math
from typing import Callable
from xml.sax.saxutils import escape

import numpy as np

from .errors import InvalidArgument
from .state import OutcomeHistogram, QuantumState

__all__ = [
    "COMPLEX_WIDTH_CAP",
    "complex_histogram",
    "render_complex_histogram",
    "render_histogram",
    "histogram_text",
    "histogram_svg",
]

COMPLEX_WIDTH_CAP = 10
_BAR = 40
_ARROWS = "→↗↑↖←↙↓↘"
_ZERO = 1e-12

Annotate = Callable[[int], str]


def _header(hist: OutcomeHistogram) -> str:
    if hist.exact:
        return "# exact"
    return f"# shots={hist.shots} seed={hist.seed} prng={hist.prng}"


def histogram_text(hist: OutcomeHistogram, annotate: Annotate | None = None) -> str:
    rows = hist.to_rows()
    width = max([len("label")] + [len(r["label"]) for r in rows])
    peak = max((r["probability"] for r in rows), default=0.0) or 1.0
    value_col = "probability" if hist.exact else "count"
    lines = [_header(hist), f"{'label'.ljust(width)}  {value_col:>12}  bar"]
    for r in rows:
        shown = f"{r['probability']:.9f}" if hist.exact else str(r["count"])
        bar = "#" * int(round(_BAR * r["probability"] / peak))
        line = f"{r['label'].ljust(width)}  {shown:>12}  {bar.ljust(_BAR)}"
        if annotate is not None:
            line += "  " + annotate(r["index"])
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"


def _svg_open(w: int, h: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
    ]


def histogram_svg(hist: OutcomeHistogram, title: str = "") -> str:
    rows = hist.to_rows()
    row_h, label_w, bar_w = 18, 12 + 8 * max([1] + [len(r["label"]) for r in rows]), 320
    h = 40 + row_h * len(rows)
    w = label_w + bar_w + 140
    peak = max((r["probability"] for r in rows), default=0.0) or 1.0
    out = _svg_open(w, h)
    caption = title or _header(hist)[2:]
    out.append(f'<text x="8" y="18" font-family="monospace" font-size="12">{escape(caption)}</text>')
    for i, r in enumerate(rows):
        y = 30 + i * row_h
        bw = bar_w * r["probability"] / peak
        shown = f"{r['probability']:.6f}" if hist.exact else str(r["count"])
        out.append(f'<text x="8" y="{y + 12}" font-family="monospace" font-size="12">{escape(r["label"])}</text>')
        out.append(f'<rect x="{label_w}" y="{y + 2}" width="{bw:.3f}" height="{row_h - 4}" fill="steelblue"/>')
        out.append(f'<text x="{label_w + bar_w + 8}" y="{y + 12}" font-family="monospace" font-size="12">{shown}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_histogram(hist: OutcomeHistogram, fmt: str, annotate: Annotate | None = None) -> str:
    if fmt == "text":
        return histogram_text(hist, annotate)
    if fmt == "csv":
        return hist.to_csv()
    if fmt == "json":
        return hist.to_json() + "\n"
    if fmt == "svg":
        return histogram_svg(hist)
    raise InvalidArgument(f"format: unknown {fmt!r}")


# -- complex histograms ----------------------------------------------------

def complex_histogram(state: QuantumState, cutoff: float = _ZERO) -> list[tuple[int, float, float]]:
    """(index, magnitude, phase) for each amplitude above ``cutoff``.

    Phases lie in (-π, π]. Components below the cutoff are zeroed first so
    that signed zeros cannot flip an arrow from π to -π.
    """
    if state.num_qubits > COMPLEX_WIDTH_CAP:
        raise InvalidArgument(
            f"state width {state.num_qubits} exceeds the complex histogram cap of "
            f"{COMPLEX_WIDTH_CAP}; take a marginal first"
        )
    amps = state.amplitudes
    re = np.where(np.abs(amps.real) < cutoff, 0.0, amps.real)
    im = np.where(np.abs(amps.imag) < cutoff, 0.0, amps.imag)
    rows = []
    for i in range(amps.size):
        mag = math.hypot(re[i], im[i])
        if mag <= cutoff:
            continue
        ph = math.atan2(im[i] + 0.0, re[i] + 0.0)
        if ph <= -math.pi + 1e-12:
            ph = math.pi
        rows.append((i, mag, ph))
    return rows


def _arrow(phase: float) -> str:
    return _ARROWS[int(round(phase / (math.pi / 4))) % 8]


def _complex_text(state: QuantumState) -> str:
    rows = complex_histogram(state)
    n = state.num_qubits
    lines = [f"{'label'.ljust(max(n, 5))}  {'magnitude':>11}  {'phase':>8}  arrow  bar"]
    for i, mag, ph in rows:
        bar = "#" * int(round(_BAR * mag))
        lines.append(f"{format(i, f'0{n}b').ljust(max(n, 5))}  {mag:11.9f}  {ph:8.4f}  {_arrow(ph):^5}  {bar}")
    return "\n".join(lines) + "\n"


def _complex_svg(state: QuantumState) -> str:
    rows = complex_histogram(state)
    n = state.num_qubits
    col, top, bar_h, r = 56, 30, 160, 20
    w = max(1, len(rows)) * col + 20
    h = top + bar_h + 3 * r + 40
    out = _svg_open(w, h)
    base = top + bar_h
    cy = base + 2 * r
    for j, (i, mag, ph) in enumerate(rows):
        x = 10 + j * col
        cx = x + col / 2 - 4
        bh = bar_h * mag
        out.append(f'<rect x="{x + 8}" y="{base - bh:.3f}" width="{col - 24}" height="{bh:.3f}" fill="steelblue"/>')
        out.append(f'<circle cx="{cx:.3f}" cy="{cy}" r="{r}" fill="none" stroke="gray"/>')
        ax = cx + r * math.cos(ph)
        ay = cy - r * math.sin(ph)
        out.append(f'<line x1="{cx:.3f}" y1="{cy}" x2="{ax:.3f}" y2="{ay:.3f}" stroke="crimson" stroke-width="2"/>')
        out.append(f'<circle cx="{ax:.3f}" cy="{ay:.3f}" r="2.5" fill="crimson"/>')
        out.append(
            f'<text x="{cx:.3f}" y="{cy + r + 16}" font-family="monospace" font-size="11" '
            f'text-anchor="middle">{format(i, f"0{n}b")}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_complex_histogram(state: QuantumState, fmt: str = "text") -> str:
    """One row per nonzero amplitude: magnitude bar plus a phase arrow.

    ``fmt`` is ``"text"`` or ``"svg"``; the SVG draws each phase as an arrow
    on a unit circle below its bar.
    """
    if fmt == "text":
        return _complex_text(state)
    if fmt == "svg":
        return _complex_svg(state)
    raise InvalidArgument(f"format: complex histograms render as text or svg, not {fmt!r}")
