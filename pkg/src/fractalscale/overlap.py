"""Finite-depth certification that an additive construction does not overlap itself.

A depth is *certified* when the iterated closed chain never crosses or runs
along itself (isolated touching points are allowed, since they leave bump
interiors disjoint) and its exact shoelace area equals the additive series
value at that depth.
Candidate segment pairs are pruned with a uniform grid built from float
boxes widened by a safety margin; every verdict is decided by exact
orientation signs in Z[sqrt 3].

Note that the area equality alone cannot fail for chains produced by
rewriting (signed area is additive over segment replacements), so the
crossing test is the discriminating half of the certificate; the equality
still guards against engine bugs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels as K
from .config import DEFAULT_CAP, check_cap
from .errors import DegenerateSegment, Unbounded
from .geometry import Chain, Point, bump_basis, iterate_additive_levels, shoelace_area
from .qfield import QuadExt, sign
from .series import AdditiveAreaBasis, area_at_additive


@dataclass(frozen=True)
class OverlapReport:
    """Per-depth verdict.

    ``simple_curve`` is strict simplicity (no two non-adjacent segments meet
    at all). ``overlap_free`` allows the curve to touch itself at isolated
    points without crossing, which keeps bump interiors disjoint;
    ``touching_points`` counts such points. ``witness`` is the
    lexicographically smallest segment pair responsible for an overlap.
    """

    depth: int
    simple_curve: bool | None
    area_matches_series: bool | None
    certified: bool
    witness: tuple[int, int] | None = None
    skipped: bool = False
    overlap_free: bool | None = None
    touching_points: int | None = None

    def to_json(self):
        return {
            "depth": self.depth,
            "simple": self.simple_curve,
            "overlap_free": self.overlap_free,
            "touching_points": self.touching_points,
            "area_match": self.area_matches_series,
            "certified": self.certified,
            "witness": list(self.witness) if self.witness is not None else None,
            "skipped": self.skipped,
        }


@dataclass(frozen=True)
class SubadditivityBound:
    bound: QuadExt


# ---------------------------------------------------------------------------
# scalar predicate


def _orient(a: Point, b: Point, c: Point) -> int:
    return sign((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))


def _between(a: Point, b: Point, c: Point) -> bool:
    """For collinear c: is c on the closed segment ab?"""
    return sign((c.x - a.x) * (c.x - b.x) + (c.y - a.y) * (c.y - b.y)) <= 0


def segments_properly_intersect(a1, a2, b1, b2, adjacent=False) -> bool:
    """Do closed segments a1a2 and b1b2 meet anywhere not permitted?

    With ``adjacent=True`` the segments are consecutive chain edges
    (``a2 == b1``) and that shared endpoint is allowed; they then fail only
    if they fold back over each other.
    """
    if a1 == a2 or b1 == b2:
        raise DegenerateSegment("segment endpoints coincide")
    if adjacent:
        if a2 != b1:
            raise ValueError("adjacent segments must share a2 == b1")
        if _orient(a1, a2, b2) != 0:
            return False
        d = (a2.x - a1.x) * (b2.x - b1.x) + (a2.y - a1.y) * (b2.y - b1.y)
        return sign(d) < 0
    o1, o2 = _orient(a1, a2, b1), _orient(a1, a2, b2)
    o3, o4 = _orient(b1, b2, a1), _orient(b1, b2, a2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and _between(a1, a2, b1))
        or (o2 == 0 and _between(a1, a2, b2))
        or (o3 == 0 and _between(b1, b2, a1))
        or (o4 == 0 and _between(b1, b2, a2))
    )


# ---------------------------------------------------------------------------
# vectorized predicate over index pairs


def _take(arrs, idx):
    return tuple(a[idx] for a in arrs)


def _sub(p, q):
    return tuple(x - y for x, y in zip(p, q))


def _cross_sign(u, v):
    """sign of u x v for vectors given as (xa, xb, ya, yb)."""
    a1, b1 = K.zmul(u[0], u[1], v[2], v[3])
    a2, b2 = K.zmul(u[2], u[3], v[0], v[1])
    return K.vsign(a1 - a2, b1 - b2)


def _dot_sign(u, v):
    a1, b1 = K.zmul(u[0], u[1], v[0], v[1])
    a2, b2 = K.zmul(u[2], u[3], v[2], v[3])
    return K.vsign(a1 + a2, b1 + b2)


def _orient_v(a, b, c):
    return _cross_sign(_sub(b, a), _sub(c, a))


def _on_segment_v(a, b, c, mask):
    out = np.zeros(len(mask), dtype=bool)
    idx = np.nonzero(mask)[0]
    if len(idx):
        aa, bb, cc = _take(a, idx), _take(b, idx), _take(c, idx)
        out[idx] = _dot_sign(_sub(cc, aa), _sub(cc, bb)) <= 0
    return out


def _closed_intersect_v(a1, a2, b1, b2):
    o1, o2 = _orient_v(a1, a2, b1), _orient_v(a1, a2, b2)
    o3, o4 = _orient_v(b1, b2, a1), _orient_v(b1, b2, a2)
    hit = ((o1.astype(np.int16) * o2) < 0) & ((o3.astype(np.int16) * o4) < 0)
    hit |= _on_segment_v(a1, a2, b1, o1 == 0)
    hit |= _on_segment_v(a1, a2, b2, o2 == 0)
    hit |= _on_segment_v(b1, b2, a1, o3 == 0)
    hit |= _on_segment_v(b1, b2, a2, o4 == 0)
    return hit


def _candidate_pairs(coords, S):
    """Non-adjacent segment pairs (i < j) whose widened boxes share a grid cell."""
    x, y = coords.floats()
    nx, ny = np.roll(x, -1), np.roll(y, -1)
    xmin, xmax = np.minimum(x, nx), np.maximum(x, nx)
    ymin, ymax = np.minimum(y, ny), np.maximum(y, ny)
    h = float(np.max(np.hypot(nx - x, ny - y)))
    span = max(float(np.max(np.abs(x))), float(np.max(np.abs(y))), 1.0)
    eps = 1e-9 * span + 4 * h * 1e-9
    ix0 = np.floor((xmin - eps) / h).astype(np.int64)
    ix1 = np.floor((xmax + eps) / h).astype(np.int64)
    iy0 = np.floor((ymin - eps) / h).astype(np.int64)
    iy1 = np.floor((ymax + eps) / h).astype(np.int64)
    width = int(iy1.max() - iy0.min()) + 3
    seg = np.arange(S, dtype=np.int64)
    keys, ids = [], []
    for ox in range(int((ix1 - ix0).max()) + 1):
        for oy in range(int((iy1 - iy0).max()) + 1):
            ok = (ix0 + ox <= ix1) & (iy0 + oy <= iy1)
            keys.append((ix0[ok] + ox - ix0.min()) * width + (iy0[ok] + oy - iy0.min()))
            ids.append(seg[ok])
    keys = np.concatenate(keys)
    ids = np.concatenate(ids)
    order = np.lexsort((ids, keys))
    keys, ids = keys[order], ids[order]

    found = []
    k = 1
    while k < len(keys):
        same = keys[k:] == keys[:-k]
        if not same.any():
            break
        found.append(np.stack([ids[:-k][same], ids[k:][same]]))
        k += 1
    if not found:
        return np.empty((0,), np.int64), np.empty((0,), np.int64)
    pairs = np.concatenate(found, axis=1)
    lo, hi = pairs.min(axis=0), pairs.max(axis=0)
    code = np.unique(lo * S + hi)
    lo, hi = code // S, code % S
    adjacent = (hi - lo == 1) | ((lo == 0) & (hi == S - 1))
    keep = (lo != hi) & ~adjacent
    return lo[keep], hi[keep]


def _adjacent_failures(pts, S):
    """Indices i such that segments i and i+1 fold back onto each other."""
    nxt = tuple(np.roll(a, -1) for a in pts)
    nn = tuple(np.roll(a, -2) for a in pts)
    u, v = _sub(nxt, pts), _sub(nn, nxt)
    col = _cross_sign(u, v) == 0
    bad = np.zeros(S, dtype=bool)
    idx = np.nonzero(col)[0]
    if len(idx):
        bad[idx] = _dot_sign(_take(u, idx), _take(v, idx)) < 0
    i = np.nonzero(bad)[0]
    j = (i + 1) % S
    return np.minimum(i, j), np.maximum(i, j)


def find_intersections(chain: Chain, chunk=400_000):
    """All failing segment index pairs (i < j), sorted lexicographically."""
    c = chain.coords
    S = len(c)
    pts = c.arrays()
    nxt = tuple(np.roll(a, -1) for a in pts)
    zero = np.ones(S, dtype=bool)
    for a, b in zip(pts, nxt):
        zero &= a == b
    if zero.any():
        raise DegenerateSegment(f"segment {int(np.nonzero(zero)[0][0])} has zero length")

    ai, aj = _adjacent_failures(pts, S)
    lo, hi = _candidate_pairs(c, S)
    bad_lo, bad_hi = [ai], [aj]
    for start in range(0, len(lo), chunk):
        i, j = lo[start : start + chunk], hi[start : start + chunk]
        hit = _closed_intersect_v(_take(pts, i), _take(nxt, i), _take(pts, j), _take(nxt, j))
        bad_lo.append(i[hit])
        bad_hi.append(j[hit])
    i = np.concatenate(bad_lo).astype(np.int64)
    j = np.concatenate(bad_hi).astype(np.int64)
    code = np.unique(i * S + j)
    return [(int(q // S), int(q % S)) for q in code]


def _half(v) -> int:
    """0 for directions in [0, pi), 1 for [pi, 2 pi)."""
    sy = sign(v[1])
    return 0 if sy > 0 or (sy == 0 and sign(v[0]) > 0) else 1


def _angle_cmp(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    return -sign(u[0] * v[1] - u[1] * v[0])


def _interleaved(p, q) -> bool | None:
    """Do passages p, q (pairs of direction vectors) cross at their common point?

    Returns None when two directions coincide (the curve runs along itself).
    """
    from functools import cmp_to_key

    tagged = [(p[0], 0), (p[1], 0), (q[0], 1), (q[1], 1)]
    tagged.sort(key=cmp_to_key(lambda s, t: _angle_cmp(s[0], t[0])))
    for k in range(4):
        if _angle_cmp(tagged[k][0], tagged[(k + 1) % 4][0]) == 0:
            return None
    tags = [t for _, t in tagged]
    return tags[0] != tags[1] and tags[1] != tags[2]


def _contact_points(a1, a2, b1, b2):
    out = set()
    for c, (s, t) in ((b1, (a1, a2)), (b2, (a1, a2)), (a1, (b1, b2)), (a2, (b1, b2))):
        if _orient(s, t, c) == 0 and _between(s, t, c):
            out.add(c)
    return out


def classify_contacts(chain: Chain, pairs):
    """Split intersecting pairs into overlaps and harmless touches.

    Returns ``(overlap_pairs, touching_points)``. A pair overlaps when the
    segments cross transversally or share a stretch of positive length; a
    point where several passages of the curve meet is harmless exactly when
    no two passages interleave around it (the curve touches, not crosses).
    """
    S = len(chain)
    pt = chain.coords.point
    bad = set()
    at_point = {}
    for i, j in pairs:
        a1, a2, b1, b2 = pt(i), pt((i + 1) % S), pt(j), pt((j + 1) % S)
        o = (_orient(a1, a2, b1), _orient(a1, a2, b2), _orient(b1, b2, a1), _orient(b1, b2, a2))
        if o[0] * o[1] < 0 and o[2] * o[3] < 0:
            bad.add((i, j))
            continue
        if all(v == 0 for v in o):
            d = (a2.x - a1.x, a2.y - a1.y)
            t1 = (b1.x - a1.x) * d[0] + (b1.y - a1.y) * d[1]
            t2 = (b2.x - a1.x) * d[0] + (b2.y - a1.y) * d[1]
            lo, hi = (t1, t2) if t1 <= t2 else (t2, t1)
            end = d[0] * d[0] + d[1] * d[1]
            if (hi if hi < end else end) > (lo if lo > 0 else QuadExt(0)):
                bad.add((i, j))
                continue
        for x in _contact_points(a1, a2, b1, b2):
            at_point.setdefault(x, set()).update((i, j))
    touching = 0
    for x, segs in at_point.items():
        passages = {}
        for s in segs:
            a, b = pt(s), pt((s + 1) % S)
            if x == a:
                k = s
            elif x == b:
                k = (s + 1) % S
            else:
                passages[("seg", s)] = (a, b)
                continue
            passages[("vtx", k)] = (pt((k - 1) % S), pt((k + 1) % S))
        dirs = [
            ((a.x - x.x, a.y - x.y), (b.x - x.x, b.y - x.y)) for a, b in passages.values()
        ]
        crossed = False
        for m in range(len(dirs)):
            for n in range(m + 1, len(dirs)):
                if _interleaved(dirs[m], dirs[n]) is not False:
                    crossed = True
        if crossed:
            bad.update(p for p in pairs if p[0] in segs and p[1] in segs)
        else:
            touching += 1
    return sorted(bad), touching


def check_simple(chain: Chain, cap: int | None = DEFAULT_CAP) -> OverlapReport:
    """Simplicity half of the certificate; area fields are left unset."""
    check_cap(len(chain), cap, "segments")
    if len(chain) < 3:
        raise ValueError("a closed chain needs at least 3 segments")
    failures = find_intersections(chain)
    overlaps, touching = classify_contacts(chain, failures) if failures else ([], 0)
    return OverlapReport(
        depth=chain.depth,
        simple_curve=not failures,
        area_matches_series=None,
        certified=False,
        witness=overlaps[0] if overlaps else None,
        overlap_free=not overlaps,
        touching_points=touching,
    )


def verify_nonoverlap(spec, max_depth: int, cap: int | None = DEFAULT_CAP) -> list[OverlapReport]:
    """Certify depths 0..max_depth; after the first failure the rest are Skipped."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    basis = bump_basis(spec)
    reports = []
    for chain in iterate_additive_levels(spec, max_depth, cap):
        rep = check_simple(chain, cap)
        area_ok = shoelace_area(chain) == area_at_additive(basis, chain.depth)
        ok = bool(rep.overlap_free and area_ok)
        reports.append(replace(rep, area_matches_series=area_ok, certified=ok))
        if not ok:
            break
    for n in range(len(reports), max_depth + 1):
        reports.append(OverlapReport(n, None, None, False, None, skipped=True))
    return reports


def subadditivity_bound(basis: AdditiveAreaBasis) -> SubadditivityBound:
    """A0 + C/(1 - beta): an upper bound on the limit area whether or not bumps overlap."""
    if basis.beta >= 1:
        raise Unbounded(f"beta = {basis.beta} >= 1: the bump-area series has no finite sum")
    if basis.c is None:
        raise ValueError("bump constant C is unknown")
    return SubadditivityBound(basis.a0 + basis.c / (1 - basis.beta))
