"""The ten acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py`` (a summary line per criterion
is printed at the end of the run) or directly with
``python tests/test_acceptance.py``.
"""

import sys
import time
import xml.etree.ElementTree as ET
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from fractalscale import geometry as G  # noqa: E402
from fractalscale import overlap as O  # noqa: E402
from fractalscale import render  # noqa: E402
from fractalscale.params import (  # noqa: E402
    AreaKind,
    ClassTag,
    ParamPoint,
    Regime,
    classify_regime,
    diagnose,
    similarity_dimension,
)
from fractalscale.qfield import QuadExt  # noqa: E402
from fractalscale.registry import BUILTIN_NAMES, builtin, load_construction_file  # noqa: E402
from fractalscale.series import area_at_additive, area_limit, perimeter_at, series_table  # noqa: E402
from oracles import brute_force_pairs  # noqa: E402

F = Fraction
S3 = QuadExt(0, 1)
HERE = Path(__file__).parent
SVG = "{http://www.w3.org/2000/svg}"


def _spec_with_basis(name):
    spec = builtin(name)
    return spec, spec.area_basis()


def test_criterion_01_dimension_table():
    cases = [((3, 2), "1.585"), ((8, 3), "1.893"), ((4, 3), "1.262"), ((5, 3), "1.465"), ((2, 3), "0.631"), ((6, 4), "1.292"), ((10, 3), "2.10")]
    for (n, r), shown in cases:
        digits = len(shown.split(".")[1])
        assert similarity_dimension(ParamPoint(n, r), digits) == Decimal(shown), (n, r)


def test_criterion_02_closed_form_limits():
    expected = {"koch-snowflake": S3 * F(2, 5), "koch-square": QuadExt(2), "add-6-4": QuadExt(F(7, 5))}
    for name, value in expected.items():
        spec, basis = _spec_with_basis(name)
        lim = area_limit(spec.params, basis)
        assert lim.kind is AreaKind.FINITE and lim.value == value, name
    spec, basis = _spec_with_basis("koch-square")
    assert area_limit(spec.params, basis).conditional
    assert diagnose(spec.params, basis).to_json()["conditional_on_nonoverlap"] is True
    for name in ("sub-5-3", "sierpinski-triangle", "sierpinski-carpet"):
        assert area_limit(builtin(name).params).kind is AreaKind.ZERO
    rows = series_table(builtin("sub-5-3"), 6)
    assert [r.area for r in rows] == [F(5, 9) ** n for n in range(7)]
    rows = series_table(builtin("sierpinski-triangle"), 6)
    assert [r.area for r in rows] == [S3 / 4 * F(3, 4) ** n for n in range(7)]
    rows = series_table(builtin("sierpinski-carpet"), 6)
    assert [r.area for r in rows] == [F(8, 9) ** n for n in range(7)]


def _snowflake_area_terms(n):
    total = S3 / 4
    for k in range(1, n + 1):
        total = total + S3 / 4 * (3 * 4 ** (k - 1) * F(1, 3**k) ** 2)
    return total


def _koch_square_area_terms(n):
    total = QuadExt(1)
    for k in range(1, n + 1):
        total = total + 4 * 5 ** (k - 1) * F(1, 3**k) ** 2
    return total


def test_criterion_03_series_formulas():
    perimeters = {
        "sierpinski-triangle": lambda n: 3 * F(3, 2) ** n,
        "sierpinski-carpet": lambda n: 4 * F(8, 3) ** n,
        "koch-snowflake": lambda n: 3 * F(4, 3) ** n,
        "koch-square": lambda n: 4 * F(5, 3) ** n,
        "sub-2-3": lambda n: 4 * F(2, 3) ** n,
    }
    areas = {
        "sierpinski-triangle": lambda n: S3 / 4 * F(3, 4) ** n,
        "sierpinski-carpet": lambda n: QuadExt(F(8, 9) ** n),
        "koch-snowflake": _snowflake_area_terms,
        "koch-square": _koch_square_area_terms,
        "sub-2-3": lambda n: QuadExt(F(2, 9) ** n),
    }
    for name, pf in perimeters.items():
        spec = builtin(name)
        rows = series_table(spec, 6)
        for n, row in enumerate(rows):
            assert row.perimeter == pf(n) == perimeter_at(spec.params, spec.p0, n), (name, n)
            assert row.area == areas[name](n), (name, n)
        if spec.kind is ClassTag.ADDITIVE:
            basis = spec.area_basis()
            assert all(area_at_additive(basis, n) == areas[name](n) for n in range(7))


def test_criterion_04_geometry_series_agreement():
    for name, depth in (("koch-snowflake", 5), ("koch-square", 4), ("add-6-4", 4)):
        spec, basis = _spec_with_basis(name)
        for chain in G.iterate_additive_levels(spec, depth):
            n = chain.depth
            assert G.shoelace_area(chain) == area_at_additive(basis, n), (name, n)
            assert G.measured_perimeter(chain) == perimeter_at(spec.params, spec.p0, n), (name, n)
    for name in ("sierpinski-triangle", "sierpinski-carpet", "sub-2-3", "sub-5-3"):
        spec = builtin(name)
        rows = series_table(spec, 6)
        for n in range(7):
            assert G.pieceset_measures(G.iterate_subtractive(spec.rule, n)) == (rows[n].perimeter, rows[n].area), (name, n)


def test_criterion_05_segment_count_milestones():
    c = G.iterate_additive(builtin("koch-snowflake"), 1)
    assert len(c) == 12 and c.segment_length == F(1, 3)
    c = G.iterate_additive(builtin("koch-square"), 1)
    assert len(c) == 20 and c.segment_length == F(1, 3)
    assert len(G.iterate_subtractive(builtin("sierpinski-carpet").rule, 1)) == 8


def test_criterion_06_nonoverlap_certification():
    reports = O.verify_nonoverlap(builtin("koch-square"), 3)
    assert [r.depth for r in reports] == [0, 1, 2, 3] and all(r.certified for r in reports)
    reports = O.verify_nonoverlap(builtin("koch-snowflake"), 4)
    assert [r.depth for r in reports] == [0, 1, 2, 3, 4] and all(r.certified for r in reports)

    colliding = load_construction_file(HERE / "fixtures" / "colliding.json")
    reports = O.verify_nonoverlap(colliding, 3)
    failed = [r for r in reports if not r.certified and not r.skipped]
    assert failed and failed[0].witness is not None

    chains = [G.iterate_additive(colliding, d) for d in (1, 2, 3)]
    chains += [G.iterate_additive(builtin("koch-snowflake"), 4), G.iterate_additive(builtin("koch-square"), 3), G.iterate_additive(builtin("add-6-4"), 3)]
    for chain in chains:
        assert len(chain) <= 2000
        pairs = brute_force_pairs(chain.points)
        rep = O.check_simple(chain)
        assert O.find_intersections(chain) == pairs
        assert rep.simple_curve == (not pairs)
        assert rep.witness is None or rep.witness in pairs


def test_criterion_07_regime_partition():
    for r in range(2, 13):
        for n in range(1, 151):
            want = Regime.SUBCRITICAL if n <= r else Regime.INTERMEDIATE if n < r * r else Regime.SUPERCRITICAL
            assert classify_regime(ParamPoint(n, r)) is want
    add, basis = _spec_with_basis("koch-square")
    sub = builtin("sub-5-3")
    da, ds = diagnose(add.params, basis), diagnose(sub.params, sub.area_basis())
    assert (da.ratios, da.dimension, da.regime, da.perimeter) == (ds.ratios, ds.dimension, ds.regime, ds.perimeter)
    assert da.area.value == 2 and da.area.conditional
    assert ds.area.kind is AreaKind.ZERO


def test_criterion_08_subadditivity_bound():
    checked = 0
    for name in BUILTIN_NAMES:
        spec = builtin(name)
        if spec.kind is not ClassTag.ADDITIVE or not spec.realizable:
            continue
        bound = O.subadditivity_bound(spec.area_basis()).bound
        reports = O.verify_nonoverlap(spec, 4)
        for rep, chain in zip(reports, G.iterate_additive_levels(spec, 4)):
            if rep.certified:
                assert G.shoelace_area(chain) <= bound, (name, rep.depth)
                checked += 1
    assert checked == 15  # three constructions, depths 0..4


def test_criterion_09_performance():
    t0 = time.perf_counter()
    chain = G.iterate_additive(builtin("koch-snowflake"), 8)
    perimeter = G.measured_perimeter(chain)
    rep = O.check_simple(chain)
    elapsed = time.perf_counter() - t0
    assert len(chain) == 3 * 4**8 == 196_608
    assert perimeter == 3 * F(4, 3) ** 8
    assert rep.simple_curve
    assert elapsed < 30, elapsed

    t0 = time.perf_counter()
    rows = series_table(builtin("koch-snowflake"), 30, cap=None)
    elapsed = time.perf_counter() - t0
    assert len(rows) == 31 and rows[-1].element_count == 3 * 4**30
    assert elapsed < 1, elapsed


def test_criterion_10_rendering():
    plot = ET.fromstring(render.render_regime_plot().encode())
    marks = plot.findall(f".//{SVG}circle")
    assert {(m.get("data-r"), m.get("data-N")) for m in marks} == {("2", "3"), ("3", "8"), ("3", "4"), ("3", "5")}

    for name, depth, count in (("koch-snowflake", 0, 3), ("koch-square", 2, 100), ("koch-snowflake", 4, 768)):
        svg = render.render_chain(G.iterate_additive(builtin(name), depth))
        d = ET.fromstring(svg.encode()).find(f"{SVG}path").get("d")
        assert d.count("L") + d.count("M") == count
    for name, depth, count in (("sierpinski-carpet", 1, 8), ("sierpinski-triangle", 0, 1), ("sierpinski-triangle", 3, 27)):
        svg = render.render_pieces(G.iterate_subtractive(builtin(name).rule, depth))
        assert len(ET.fromstring(svg.encode()).findall(f".//{SVG}polygon")) == count

    golden = (HERE / "golden" / "koch_snowflake_depth3.svg").read_text(encoding="utf-8")
    for _ in range(2):
        svg = render.render_chain(G.iterate_additive(builtin("koch-snowflake"), 3), title="koch-snowflake depth 3")
        assert svg == golden


def main():
    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        num, title = name[len("test_criterion_") :].split("_", 1)
        try:
            fn()
            status = "PASS"
        except Exception as e:  # report and keep going
            status = f"FAIL ({type(e).__name__}: {e})"
            failed += 1
        print(f"criterion {int(num):2d} {status}  {title.replace('_', ' ')}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
