"""Additive boundary rewriting and subtractive subdivision with exact coordinates.

Orientation convention: a generator template runs from (0,0) to (1,0) with
its bump on the +y (left) side, and base polygons are traversed clockwise,
so the left of every directed boundary edge is the exterior. Shoelace areas
are reported with the clockwise-positive sign so that regions come out
positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels as K
from .config import DEFAULT_CAP, check_cap
from .errors import BrokenInvariant, DegenerateGenerator, NotRealizable
from .qfield import QuadExt, parse
from .series import AdditiveAreaBasis


class Point(NamedTuple):
    x: QuadExt
    y: QuadExt

    @classmethod
    def of(cls, x, y):
        return cls(QuadExt.coerce(x), QuadExt.coerce(y))

    def render(self):
        return f"{self.x.render()} {self.y.render()}"


def P(x, y=0) -> Point:
    """Shorthand: numbers, Fractions, QuadExt or textual literals."""
    conv = lambda v: parse(v) if isinstance(v, str) else QuadExt.coerce(v)  # noqa: E731
    return Point(conv(x), conv(y))


class PointArray:
    """Points ``((xa + xb*sqrt3)/den, (ya + yb*sqrt3)/den)`` as integer arrays."""

    __slots__ = ("xa", "xb", "ya", "yb", "den")

    def __init__(self, xa, xb, ya, yb, den=1, reduce=True):
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        arrays = K.compact(xa, xb, ya, yb, limit=1 << 62) if reduce else (xa, xb, ya, yb)
        if reduce:
            g = K.gcd_all(arrays, den)
            if g > 1:
                arrays = tuple(a // g for a in arrays)
                den //= g
            arrays = K.compact(*arrays)
        self.xa, self.xb, self.ya, self.yb = arrays
        self.den = den

    @classmethod
    def from_points(cls, points) -> "PointArray":
        points = list(points)
        den = 1
        for p in points:
            for c in (p.x.a, p.x.b, p.y.a, p.y.b):
                den = den * c.denominator // math.gcd(den, c.denominator)

        def col(get):
            return np.array([int(get(p) * den) for p in points], dtype=object)

        return cls(
            col(lambda p: p.x.a), col(lambda p: p.x.b), col(lambda p: p.y.a), col(lambda p: p.y.b), den
        )

    def __len__(self):
        return len(self.xa)

    def arrays(self):
        return self.xa, self.xb, self.ya, self.yb

    def point(self, i) -> Point:
        d = self.den
        return Point(
            QuadExt(Fraction(int(self.xa[i]), d), Fraction(int(self.xb[i]), d)),
            QuadExt(Fraction(int(self.ya[i]), d), Fraction(int(self.yb[i]), d)),
        )

    def to_points(self) -> list[Point]:
        return [self.point(i) for i in range(len(self))]

    def floats(self):
        """Approximate float coordinates (for binning and drawing only)."""
        x = (self.xa.astype(np.float64) + self.xb.astype(np.float64) * K.SQRT3_F) / self.den
        y = (self.ya.astype(np.float64) + self.yb.astype(np.float64) * K.SQRT3_F) / self.den
        return x, y

    def rescaled(self, den):
        """Same points over a multiple ``den`` of the current denominator."""
        f = den // self.den
        if f * self.den != den:
            raise ValueError("target denominator must be a multiple")
        arrays = self.arrays()
        if K.max_abs(*arrays) * f >= 1 << 62:
            arrays = K.promote(*arrays)
        return tuple(a * f for a in arrays)

    def __eq__(self, other):
        if not isinstance(other, PointArray):
            return NotImplemented
        return self.den == other.den and all(
            np.array_equal(np.asarray(a, dtype=object), np.asarray(b, dtype=object))
            for a, b in zip(self.arrays(), other.arrays())
        )


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class GeneratorTemplate:
    vertices: tuple
    scale: int
    n_pieces: int

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(Point.of(*v) for v in self.vertices))


@dataclass(frozen=True)
class SubdivisionRule:
    """``archetype`` is ``"grid"`` (r x r mask, row 0 at the top) or ``"triangle"``."""

    archetype: str
    scale: int
    n_pieces: int
    mask: tuple | None = None

    def __post_init__(self):
        if self.mask is not None:
            object.__setattr__(self, "mask", tuple(tuple(bool(c) for c in row) for row in self.mask))

    def offsets(self) -> list[Point]:
        """Lower-left corners of the retained cells of the unit archetype."""
        if self.archetype == "triangle":
            return [P(0, 0), P(Fraction(1, 2), 0), P(Fraction(1, 4), QuadExt(0, Fraction(1, 4)))]
        r = self.scale
        return [
            P(Fraction(col, r), Fraction(r - 1 - row, r))
            for row in range(r)
            for col in range(r)
            if self.mask[row][col]
        ]


@dataclass(frozen=True)
class SeriesOnly:
    """An additive construction known only through its series data."""

    a0: QuadExt
    c: QuadExt | None = None


def template_violations(g: GeneratorTemplate) -> list[str]:
    out = []
    v = g.vertices
    if not isinstance(g.scale, int) or g.scale < 2:
        out.append(f"scale must be an integer >= 2 for geometric generators, got {g.scale}")
        return out
    if len(v) != g.n_pieces + 1:
        out.append(f"generator needs N+1 = {g.n_pieces + 1} vertices, has {len(v)}")
    if not v:
        return out
    if v[0] != P(0, 0):
        out.append(f"first vertex must be (0,0), got ({v[0].render()})")
    if v[-1] != P(1, 0):
        out.append(f"last vertex must be (1,0), got ({v[-1].render()})")
    want = Fraction(1, g.scale**2)
    for i in range(len(v) - 1):
        dx, dy = v[i + 1].x - v[i].x, v[i + 1].y - v[i].y
        d2 = dx * dx + dy * dy
        if d2 != want:
            out.append(f"segment {i} has squared length {d2.render()}, expected {want}")
    interior = v[1:-1]
    if any(p.y < 0 for p in interior):
        out.append("interior vertices must have y >= 0")
    if interior and all(p.y == 0 for p in interior) or not interior:
        out.append("DegenerateGenerator: no interior vertex above the base (flat generator)")
    return out


def rule_violations(rule: SubdivisionRule) -> list[str]:
    out = []
    if rule.archetype == "triangle":
        if rule.scale != 2 or rule.n_pieces != 3:
            out.append("triangle subdivision keeps three corners: requires N = 3, r = 2")
        if rule.mask is not None:
            out.append("triangle subdivision takes no mask")
        return out
    if rule.archetype != "grid":
        return [f"unknown archetype {rule.archetype!r}"]
    r = rule.scale
    if not isinstance(r, int) or r < 2:
        return [f"grid scale must be an integer >= 2, got {r}"]
    if rule.mask is None:
        return ["grid subdivision requires a mask"]
    if len(rule.mask) != r or any(len(row) != r for row in rule.mask):
        out.append(f"mask must be {r}x{r}")
    count = sum(sum(row) for row in rule.mask)
    if count != rule.n_pieces:
        out.append(f"mask keeps {count} cells but N = {rule.n_pieces}")
    if count == r * r:
        out.append("mask removes nothing; a subtractive rule must drop at least one cell")
    return out


# ---------------------------------------------------------------------------
# base figures

_H = QuadExt(0, Fraction(1, 2))  # sqrt(3)/2

BASE_POLYGONS = {
    # clockwise: the exterior lies to the left of each directed edge
    "triangle": (P(0, 0), Point(QuadExt(Fraction(1, 2)), _H), P(1, 0)),
    "square": (P(0, 0), P(0, 1), P(1, 1), P(1, 0)),
}

ARCHETYPES = {
    "triangle": (P(0, 0), P(1, 0), Point(QuadExt(Fraction(1, 2)), _H)),
    "square": (P(0, 0), P(1, 0), P(1, 1), P(0, 1)),
}


def base_polygon(name) -> tuple:
    try:
        return BASE_POLYGONS[name]
    except KeyError:
        raise ValueError(f"unknown base {name!r}; expected 'triangle' or 'square'") from None


def shoelace_points(points) -> QuadExt:
    """Clockwise-positive signed area of a closed polygon given as Points."""
    total = QuadExt(0)
    n = len(points)
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        total = total + (q.x * p.y - p.x * q.y)
    return total / 2


def polygon_perimeter_units(points) -> int:
    """Edge count of a polygon whose edges all have unit length (asserted)."""
    n = len(points)
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        if (q.x - p.x) ** 2 + (q.y - p.y) ** 2 != 1:
            raise BrokenInvariant("archetype edges must have unit length")
    return n


# ---------------------------------------------------------------------------
# additive


@dataclass(frozen=True, eq=False)
class Chain:
    """Closed polyline; the last point connects back to the first."""

    coords: PointArray
    depth: int
    segment_length: Fraction

    @property
    def segment_length_sq(self) -> Fraction:
        return self.segment_length**2

    @property
    def points(self) -> list[Point]:
        return self.coords.to_points()

    def __len__(self):
        return len(self.coords)

    @property
    def segment_count(self):
        return len(self.coords)

    @classmethod
    def from_points(cls, points, depth=0, segment_length=Fraction(1)):
        return cls(PointArray.from_points(points), depth, Fraction(segment_length))

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (
            self.depth == other.depth
            and self.segment_length == other.segment_length
            and self.coords == other.coords
        )


def _generator_arrays(g: GeneratorTemplate):
    """Integer form of vertices 0..N-1 over a common denominator."""
    pa = PointArray.from_points(g.vertices[:-1])
    return pa.arrays(), pa.den


def rewrite_chain(chain: Chain, g: GeneratorTemplate, cap: int | None = DEFAULT_CAP) -> Chain:
    """Replace every directed segment (p, q) by the generator mapped onto it.

    The similarity is z -> p + z*(q - p) in complex notation, so (0,0) lands
    on p, (1,0) on q and the bump on the left of p->q.
    """
    c = chain.coords
    S = len(c)
    if S < 3:
        raise ValueError("chain must have at least 3 points")
    check_cap(S * g.n_pieces, cap, "segments")
    (gxa, gxb, gya, gyb), gden = _generator_arrays(g)

    xa, xb, ya, yb = c.arrays()
    dxa, dxb = np.roll(xa, -1) - xa, np.roll(xb, -1) - xb
    dya, dyb = np.roll(ya, -1) - ya, np.roll(yb, -1) - yb
    gmax = max(K.max_abs(gxa, gxb, gya, gyb), gden)
    if 2 * K.max_abs(xa, xb, ya, yb) * gmax * 16 >= 1 << 62:
        xa, xb, ya, yb, dxa, dxb, dya, dyb = K.promote(xa, xb, ya, yb, dxa, dxb, dya, dyb)
        gxa, gxb, gya, gyb = K.promote(gxa, gxb, gya, gyb)

    col = lambda a: a[:, None]  # noqa: E731  segment axis
    row = lambda a: a[None, :]  # noqa: E731  generator-vertex axis
    # (gx + i gy) * (dx + i dy)
    ra1, rb1 = K.zmul(row(gxa), row(gxb), col(dxa), col(dxb))
    ra2, rb2 = K.zmul(row(gya), row(gyb), col(dya), col(dyb))
    ra3, rb3 = K.zmul(row(gxa), row(gxb), col(dya), col(dyb))
    ra4, rb4 = K.zmul(row(gya), row(gyb), col(dxa), col(dxb))
    nxa = (col(xa) * gden + ra1 - ra2).ravel()
    nxb = (col(xb) * gden + rb1 - rb2).ravel()
    nya = (col(ya) * gden + ra3 + ra4).ravel()
    nyb = (col(yb) * gden + rb3 + rb4).ravel()
    coords = PointArray(nxa, nxb, nya, nyb, c.den * gden)
    return Chain(coords, chain.depth + 1, chain.segment_length / g.scale)


def _require_generator(spec) -> GeneratorTemplate:
    rule = spec.rule
    if isinstance(rule, SeriesOnly):
        raise NotRealizable(f"{spec.name} has no geometric realization (series-only construction)")
    if not isinstance(rule, GeneratorTemplate):
        raise TypeError(f"{spec.name} is not an additive construction")
    return rule


def base_chain(spec) -> Chain:
    return Chain.from_points(base_polygon(spec.base), 0, Fraction(1))


def iterate_additive_levels(spec, depth: int, cap: int | None = DEFAULT_CAP):
    """Yield the chains for depths 0..depth in order."""
    g = _require_generator(spec)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    chain = base_chain(spec)
    check_cap(len(chain) * g.n_pieces**depth, cap, "segments")
    yield chain
    for _ in range(depth):
        chain = rewrite_chain(chain, g, cap)
        yield chain


def iterate_additive(spec, depth: int, cap: int | None = DEFAULT_CAP) -> Chain:
    chain = None
    for chain in iterate_additive_levels(spec, depth, cap):
        pass
    return chain


def shoelace_area(chain: Chain) -> QuadExt:
    """Exact clockwise-positive signed area of the closed chain."""
    c = chain.coords
    xa, xb, ya, yb = c.arrays()
    nxa, nxb, nya, nyb = (np.roll(a, -1) for a in (xa, xb, ya, yb))
    # sum of x_{i+1} y_i - x_i y_{i+1}
    p1a, p1b = K.zmul(nxa, nxb, ya, yb)
    p2a, p2b = K.zmul(xa, xb, nya, nyb)
    ra = K.exact_sum(p1a - p2a)
    rb = K.exact_sum(p1b - p2b)
    d = 2 * c.den * c.den
    return QuadExt(Fraction(ra, d), Fraction(rb, d))


def squared_lengths_uniform(chain: Chain) -> bool:
    c = chain.coords
    xa, xb, ya, yb = c.arrays()
    dxa, dxb, dya, dyb = (np.roll(a, -1) - a for a in (xa, xb, ya, yb))
    rat = dxa * dxa + 3 * dxb * dxb + dya * dya + 3 * dyb * dyb
    irr = dxa * dxb + dya * dyb
    target = chain.segment_length_sq * c.den * c.den
    if target.denominator != 1:
        return False
    return bool(np.all(irr == 0)) and bool(np.all(rat == target.numerator))


def measured_perimeter(chain: Chain) -> QuadExt:
    """Segment count times the common segment length, after checking uniformity exactly."""
    if not squared_lengths_uniform(chain):
        raise BrokenInvariant(
            f"chain at depth {chain.depth} has a segment whose squared length differs from "
            f"{chain.segment_length_sq}"
        )
    return QuadExt(len(chain) * chain.segment_length)


def bump_basis(spec) -> AdditiveAreaBasis:
    """A0 from the base polygon and C = (unit bump area) * (sum of squared base edges)."""
    rule = spec.rule
    params = spec.params
    beta = Fraction(params.n_pieces) / Fraction(params.scale) ** 2
    if isinstance(rule, SeriesOnly):
        return AdditiveAreaBasis(rule.a0, rule.c, beta)
    g = _require_generator(spec)
    base = base_polygon(spec.base)
    a0 = shoelace_points(base)
    u = shoelace_points(g.vertices)
    if u <= 0:
        raise DegenerateGenerator(f"{spec.name}: generator encloses no bump area (u = {u.render()})")
    edges_sq = QuadExt(0)
    for i in range(len(base)):
        p, q = base[i], base[(i + 1) % len(base)]
        edges_sq = edges_sq + (q.x - p.x) ** 2 + (q.y - p.y) ** 2
    return AdditiveAreaBasis(a0, u * edges_sq, beta)


def unit_bump_area(g: GeneratorTemplate) -> QuadExt:
    return shoelace_points(g.vertices)


# ---------------------------------------------------------------------------
# subtractive


@dataclass(frozen=True, eq=False)
class PieceSet:
    """Retained cells at ``depth``: archetype scaled by ``scale**-depth`` then translated."""

    depth: int
    archetype: str
    scale: int
    translations: PointArray

    def __len__(self):
        return len(self.translations)

    @property
    def side(self) -> Fraction:
        return Fraction(1, self.scale**self.depth)

    @property
    def transforms(self):
        """(scale_exponent, translation) pairs in enumeration order."""
        return [(self.depth, t) for t in self.translations.to_points()]

    def polygons_float(self):
        """Float vertex arrays, shape (count, k, 2), for drawing."""
        x, y = self.translations.floats()
        s = float(self.side)
        verts = np.array([[float(v.x), float(v.y)] for v in ARCHETYPES[self.archetype]])
        out = np.empty((len(x), len(verts), 2))
        out[:, :, 0] = x[:, None] + s * verts[None, :, 0]
        out[:, :, 1] = y[:, None] + s * verts[None, :, 1]
        return out

    def piece_points(self, i) -> list[Point]:
        t = self.translations.point(i)
        s = self.side
        return [Point(t.x + v.x * s, t.y + v.y * s) for v in ARCHETYPES[self.archetype]]


def _archetype_of(rule: SubdivisionRule) -> str:
    return "triangle" if rule.archetype == "triangle" else "square"


def iterate_subtractive(rule: SubdivisionRule, depth: int, cap: int | None = DEFAULT_CAP) -> PieceSet:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    check_cap(rule.n_pieces**depth, cap, "pieces")
    offs = PointArray.from_points(rule.offsets())
    oa = offs.arrays()
    zero = np.zeros(1, dtype=np.int64)
    t = PointArray(zero, zero, zero, zero, 1)
    for level in range(depth):
        # children of a piece of side r**-level sit at t + offset * r**-level
        step_den = offs.den * rule.scale**level
        den = t.den * step_den // math.gcd(t.den, step_den)
        ta = t.rescaled(den)
        f = den // step_den
        parts = []
        for a, o in zip(ta, oa):
            o = o.astype(object) * f if a.dtype == object else o * f
            parts.append((a[:, None] + o[None, :]).ravel())
        t = PointArray(*parts, den)
    return PieceSet(depth, _archetype_of(rule), rule.scale, t)


def pieceset_measures(ps: PieceSet) -> tuple[QuadExt, QuadExt]:
    """(total edge length, total area) of the retained pieces."""
    arche = ARCHETYPES[ps.archetype]
    edges = polygon_perimeter_units(arche)
    unit_area = shoelace_points(tuple(reversed(arche)))
    count = len(ps)
    side = ps.side
    return QuadExt(count * edges * side), unit_area * (count * side * side)


# ---------------------------------------------------------------------------
# export


def dump_points(points) -> str:
    """One ``x y`` pair per line in the Q(sqrt3) textual form."""
    return "".join(p.render() + "\n" for p in points)


def dump_pieces(ps: PieceSet) -> str:
    blocks = []
    for i in range(len(ps)):
        blocks.append(dump_points(ps.piece_points(i)))
    return "\n".join(blocks)
