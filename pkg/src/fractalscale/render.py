"""SVG output: iteration figures and the (N, r) regime plot.

Exact coordinates are converted to floats and printed with 6 decimals for
the document only. Attribute order is fixed so identical inputs give
byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import Chain, PieceSet
from .params import Regime, regime_for

SVG_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'
SVG_NS = "http://www.w3.org/2000/svg"

REGIME_COLORS = {
    Regime.SUBCRITICAL: "#d9d9d9",  # light grey
    Regime.INTERMEDIATE: "#fff4b3",  # light yellow
    Regime.SUPERCRITICAL: "#f6c2c2",  # light red
}


@dataclass(frozen=True)
class Style:
    width: int = 600
    height: int = 600
    stroke: str = "#1f3b73"
    fill: str = "#9ec5e8"
    stroke_width: float = 1.0
    background: str = "#ffffff"


@dataclass(frozen=True)
class RegimeMark:
    label: str
    r: Fraction
    N: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "N", Fraction(self.N))
        if self.r <= 1 or self.N < 1:
            raise ValueError("marks need r > 1 and N >= 1")

    @property
    def regime(self) -> Regime:
        return regime_for(self.N, self.r)


DEFAULT_MARKS = (
    RegimeMark("Sierpinski triangle", 2, 3),
    RegimeMark("Sierpinski carpet", 3, 8),
    RegimeMark("Koch snowflake", 3, 4),
    RegimeMark("Koch square", 3, 5),
)


def fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _view_box(x, y):
    xmin, xmax = float(np.min(x)), float(np.max(x))
    ymin, ymax = float(np.min(y)), float(np.max(y))
    pad = 0.05 * max(xmax - xmin, ymax - ymin, 1e-12)
    return xmin - pad, ymin - pad, (xmax - xmin) + 2 * pad, (ymax - ymin) + 2 * pad


def _open(style: Style, vb, title):
    vx, vy, vw, vh = vb
    return [
        SVG_HEADER,
        f'<svg xmlns="{SVG_NS}" version="1.1" width="{style.width}" height="{style.height}" '
        f'viewBox="{fmt(vx)} {fmt(vy)} {fmt(vw)} {fmt(vh)}">\n',
        f"<title>{_escape(title)}</title>\n",
        f'<rect x="{fmt(vx)}" y="{fmt(vy)}" width="{fmt(vw)}" height="{fmt(vh)}" fill="{style.background}"/>\n',
    ]


def render_chain(chain: Chain, style: Style | None = None, title="iterated boundary") -> str:
    """Closed path through every chain vertex (y axis pointing up)."""
    style = style or Style()
    if len(chain) == 0:
        raise ValueError("empty chain")
    x, y = chain.coords.floats()
    y = -y
    vb = _view_box(x, y)
    sw = style.stroke_width * vb[2] / style.width
    d = " ".join(
        ("M" if i == 0 else "L") + f"{fmt(px)} {fmt(py)}" for i, (px, py) in enumerate(zip(x, y))
    )
    out = _open(style, vb, title)
    out.append(
        f'<path class="chain" data-vertices="{len(x)}" d="{d} Z" fill="{style.fill}" '
        f'stroke="{style.stroke}" stroke-width="{fmt(sw)}" stroke-linejoin="round"/>\n'
    )
    out.append("</svg>\n")
    return "".join(out)


def render_pieces(ps: PieceSet, style: Style | None = None, title="retained pieces") -> str:
    """One filled polygon per retained piece."""
    style = style or Style()
    polys = ps.polygons_float()
    polys[:, :, 1] *= -1
    vb = _view_box(polys[:, :, 0], polys[:, :, 1])
    out = _open(style, vb, title)
    out.append(f'<g class="pieces" data-count="{len(polys)}" fill="{style.fill}" stroke="none">\n')
    for poly in polys:
        pts = " ".join(f"{fmt(px)},{fmt(py)}" for px, py in poly)
        out.append(f'<polygon points="{pts}"/>\n')
    out.append("</g>\n</svg>\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# regime plot

PLOT_MARGINS = (60.0, 20.0, 20.0, 50.0)  # left, right, top, bottom (pixels)


def _region_polygons(r_range, n_range, samples):
    r0, r1 = r_range
    n0, n1 = n_range
    # sample points plus the r values where each boundary leaves the N range
    exits = np.array([n0, n1, np.sqrt(max(n0, 0.0)), np.sqrt(n1)])
    exits = exits[(exits > r0) & (exits < r1)]
    rs = np.union1d(np.union1d(np.linspace(r0, r1, samples), np.arange(np.ceil(r0), np.floor(r1) + 1)), exits)
    low = np.clip(rs, n0, n1)
    high = np.clip(rs**2, n0, n1)
    bottom = np.full_like(rs, n0)
    top = np.full_like(rs, n1)

    def band(lower, upper):
        return list(zip(rs, lower)) + list(zip(rs[::-1], upper[::-1]))

    return rs, low, high, {
        Regime.SUBCRITICAL: band(bottom, low),
        Regime.INTERMEDIATE: band(low, high),
        Regime.SUPERCRITICAL: band(high, top),
    }


def render_regime_plot(
    marks=DEFAULT_MARKS,
    r_range=(1.0, 4.5),
    n_range=(0.0, 12.0),
    style: Style | None = None,
    colors=None,
    samples=181,
) -> str:
    """Shaded (r, N) plane with boundaries N = r (solid) and N = r^2 (dashed)."""
    style = style or Style(width=640, height=480)
    colors = {**REGIME_COLORS, **(colors or {})}
    r0, r1 = map(float, r_range)
    n0, n1 = map(float, n_range)
    if not (r1 > r0 and n1 > n0):
        raise ValueError("ranges must be nonempty")
    left, right, top_m, bottom_m = PLOT_MARGINS
    pw = style.width - left - right
    ph = style.height - top_m - bottom_m

    def sx(r):
        return left + (r - r0) / (r1 - r0) * pw

    def sy(n):
        return top_m + (n1 - n) / (n1 - n0) * ph

    rs, low, high, regions = _region_polygons((r0, r1), (n0, n1), samples)
    out = [
        SVG_HEADER,
        f'<svg xmlns="{SVG_NS}" version="1.1" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">\n',
        "<title>(N, r) regime plot</title>\n",
        f'<rect x="0" y="0" width="{style.width}" height="{style.height}" fill="{style.background}"/>\n',
    ]
    for regime, pts in regions.items():
        coords = " ".join(f"{fmt(sx(r))},{fmt(sy(n))}" for r, n in pts)
        out.append(
            f'<polygon class="region" data-regime="{regime.value}" points="{coords}" '
            f'fill="{colors[regime]}" stroke="none"/>\n'
        )
    for name, curve, dash in (("N=r", rs, None), ("N=r^2", rs**2, "6,4")):
        inside = (curve >= n0) & (curve <= n1)
        if not inside.any():
            continue
        coords = " ".join(f"{fmt(sx(r))},{fmt(sy(n))}" for r, n in zip(rs[inside], curve[inside]))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<polyline class="boundary" data-curve="{name}" points="{coords}" fill="none" '
            f'stroke="#000000" stroke-width="1.5"{extra}/>\n'
        )
    # axes
    x_axis, y_axis = sy(n0), sx(r0)
    out.append(
        f'<line class="axis" x1="{fmt(y_axis)}" y1="{fmt(x_axis)}" x2="{fmt(sx(r1))}" y2="{fmt(x_axis)}" stroke="#000000"/>\n'
    )
    out.append(
        f'<line class="axis" x1="{fmt(y_axis)}" y1="{fmt(x_axis)}" x2="{fmt(y_axis)}" y2="{fmt(sy(n1))}" stroke="#000000"/>\n'
    )
    for r in np.arange(np.ceil(r0), np.floor(r1) + 1):
        out.append(
            f'<text class="tick" x="{fmt(sx(r))}" y="{fmt(x_axis + 16)}" text-anchor="middle" font-size="11">{int(r)}</text>\n'
        )
    step = max(1, int(np.ceil((n1 - n0) / 12)))
    for n in np.arange(np.ceil(n0), np.floor(n1) + 1, step):
        out.append(
            f'<text class="tick" x="{fmt(y_axis - 8)}" y="{fmt(sy(n) + 4)}" text-anchor="end" font-size="11">{int(n)}</text>\n'
        )
    out.append(
        f'<text class="axis-label" x="{fmt(left + pw / 2)}" y="{fmt(style.height - 12)}" text-anchor="middle" font-size="14">r (linear scale factor)</text>\n'
    )
    out.append(
        f'<text class="axis-label" x="16" y="{fmt(top_m + ph / 2)}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 16 {fmt(top_m + ph / 2)})">N (number of pieces)</text>\n'
    )
    for m in marks:
        cx, cy = sx(float(m.r)), sy(float(m.N))
        out.append(
            f'<circle class="mark" data-label="{_escape(m.label)}" data-r="{m.r}" data-N="{m.N}" '
            f'data-regime="{m.regime.value}" cx="{fmt(cx)}" cy="{fmt(cy)}" r="4" fill="#000000"/>\n'
        )
        out.append(
            f'<text class="mark-label" x="{fmt(cx + 6)}" y="{fmt(cy - 6)}" font-size="11">{_escape(m.label)}</text>\n'
        )
    out.append("</svg>\n")
    return "".join(out)


def data_to_pixel(r, n, r_range=(1.0, 4.5), n_range=(0.0, 12.0), width=640, height=480):
    """Pixel position of the data point (r, n) in a default-layout regime plot."""
    left, right, top_m, bottom_m = PLOT_MARGINS
    pw, ph = width - left - right, height - top_m - bottom_m
    return (
        left + (r - r_range[0]) / (r_range[1] - r_range[0]) * pw,
        top_m + (n_range[1] - n) / (n_range[1] - n_range[0]) * ph,
    )
