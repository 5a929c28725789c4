"""Search for a generator whose iterates are fine at depth 1 but overlap at depth 2.

Walks of N steps of length 1/r with headings at multiples of ``--angle``
degrees are enumerated from (0,0) to (1,0) with the bump on the +y side.
The first walk (tallest bump first) whose depth-1 chain on the base
polygon is strictly simple and whose depth-2 chain has a genuine overlap
is printed as a construction file.

    python scripts/find_colliding_fixture.py --r 3 --n 7 --out tests/fixtures/colliding.json
"""

import argparse
import sys
from fractions import Fraction

from fractalscale import geometry as G
from fractalscale import overlap as O
from fractalscale import registry as R
from fractalscale.params import ClassTag, ParamPoint
from fractalscale.qfield import QuadExt

HALF = Fraction(1, 2)
H = QuadExt(0, HALF)  # sqrt(3)/2

# unit headings at multiples of 30 degrees
HEADINGS = [
    (QuadExt(1), QuadExt(0)),
    (H, QuadExt(HALF)),
    (QuadExt(HALF), H),
    (QuadExt(0), QuadExt(1)),
    (QuadExt(-HALF), H),
    (-H, QuadExt(HALF)),
    (QuadExt(-1), QuadExt(0)),
    (-H, QuadExt(-HALF)),
    (QuadExt(-HALF), -H),
    (QuadExt(0), QuadExt(-1)),
    (QuadExt(HALF), -H),
    (H, QuadExt(-HALF)),
]


def walks(n, r, step):
    """All heading sequences of length n that end at (1, 0) with interior y >= 0."""
    inv = Fraction(1, r)
    end = G.P(1, 0)

    def rec(path, pts):
        k = len(path)
        if k == n:
            if pts[-1] == end:
                yield list(pts)
            return
        last = pts[-1]
        remaining = n - k
        for h in range(0, 12, step):
            if path and (h - path[-1]) % 12 == 6:
                continue  # immediate reversal
            dx, dy = HEADINGS[h]
            p = G.Point(last.x + dx * inv, last.y + dy * inv)
            if remaining > 1 and p.y < 0:
                continue
            dist2 = float((1 - p.x) ** 2 + p.y**2)
            if dist2 > ((remaining - 1) / r) ** 2 + 1e-12:
                continue
            if p in pts:
                continue
            yield from rec(path + [h], pts + [p])

    yield from rec([], [G.P(0, 0)])


def make_spec(vertices, n, r, base):
    return R.ConstructionSpec(
        "colliding-fixture",
        ParamPoint(n, Fraction(r), ClassTag.ADDITIVE),
        G.GeneratorTemplate(tuple(vertices), r, n),
        base,
        "search",
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--angle", type=int, default=90, choices=(30, 60, 90))
    ap.add_argument("--base", default="square")
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    candidates = []
    for pts in walks(args.n, args.r, args.angle // 30):
        spec = make_spec(pts, args.n, args.r, args.base)
        if R.validate(spec):
            continue
        height = max(float(p.y) for p in pts)
        candidates.append((-height, [p.render() for p in pts], spec))
    candidates.sort(key=lambda c: (c[0], c[1]))
    print(f"{len(candidates)} valid generators", file=sys.stderr)

    for _, _, spec in candidates:
        c1 = G.iterate_additive(spec, 1)
        if not O.check_simple(c1).simple_curve:
            continue
        rep = O.check_simple(G.rewrite_chain(c1, spec.rule))
        if rep.overlap_free:
            continue
        text = R.serialize(spec)
        print(f"found: witness {rep.witness} at depth 2", file=sys.stderr)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        print(text, end="")
        return 0
    print("no colliding generator found", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
