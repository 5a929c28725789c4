from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractalscale import geometry as G
from fractalscale.config import DEFAULT_CAP
from fractalscale.errors import CapExceeded
from fractalscale.params import AreaKind, ClassTag, ParamPoint
from fractalscale.qfield import QuadExt
from fractalscale.registry import BUILTIN_NAMES, builtin
from fractalscale.series import (
    CSV_COLUMNS,
    AdditiveAreaBasis,
    area_at_additive,
    area_at_subtractive,
    area_limit,
    perimeter_at,
    series_table,
    table_to_csv,
)
from oracles import additive_area_terms, count_additive_area

F = Fraction
S3 = QuadExt(0, 1)


def test_perimeter_examples():
    assert perimeter_at(ParamPoint(4, 3), QuadExt(3), 2) == F(16, 3)
    assert perimeter_at(ParamPoint(8, 3, "subtractive"), QuadExt(4), 3) == F(2048, 27)
    assert perimeter_at(ParamPoint(8, 3), QuadExt(4), 0) == 4


def test_subtractive_area_examples():
    assert area_at_subtractive(S3 / 4, F(3, 4), 1) == S3 * F(3, 16)
    assert area_at_subtractive(QuadExt(1), F(8, 9), 5) == F(32768, 59049)
    assert area_at_subtractive(QuadExt(7), F(8, 9), 0) == 7


def test_additive_area_examples():
    snow = AdditiveAreaBasis(S3 / 4, S3 / 12, F(4, 9))
    assert area_at_additive(snow, 1) == S3 / 3
    square = AdditiveAreaBasis(QuadExt(1), QuadExt(F(4, 9)), F(5, 9))
    # 1 + 4/9 + 20/81
    assert area_at_additive(square, 2) == 1 + F(4, 9) + F(20, 81) == F(137, 81)
    assert area_at_additive(square, 0) == 1


def test_additive_linear_growth_at_beta_one():
    b = AdditiveAreaBasis(QuadExt(1), QuadExt(F(1, 3)), F(1))
    assert area_at_additive(b, 6) == 3
    lim = area_limit(ParamPoint(9, 3), b)
    assert lim.kind is AreaKind.LINEAR_GROWTH and lim.slope == F(1, 3) and lim.conditional


@pytest.mark.parametrize(
    "name, value",
    [("koch-snowflake", QuadExt(0, F(2, 5))), ("koch-square", QuadExt(2)), ("add-6-4", QuadExt(F(7, 5)))],
)
def test_finite_limits(name, value):
    spec = builtin(name)
    lim = area_limit(spec.params, spec.area_basis())
    assert lim.kind is AreaKind.FINITE and lim.value == value and lim.conditional


def test_limit_kinds_for_subtractive_and_series_only():
    for name in ("sierpinski-triangle", "sierpinski-carpet", "sub-2-3", "sub-5-3"):
        assert area_limit(builtin(name).params).kind is AreaKind.ZERO
    spec = builtin("add-10-3")
    assert area_limit(spec.params, spec.area_basis()).kind is AreaKind.DIVERGENT


def test_basis_validation():
    with pytest.raises(ValueError):
        AdditiveAreaBasis(QuadExt(0), QuadExt(1), F(1, 2))
    with pytest.raises(ValueError):
        AdditiveAreaBasis(QuadExt(1), QuadExt(-1), F(1, 2))


def test_table_examples():
    rows = series_table(builtin("sierpinski-triangle"), 2)
    assert [r.perimeter for r in rows] == [3, F(9, 2), F(27, 4)]
    assert [r.area for r in rows] == [S3 / 4, S3 * F(3, 16), S3 * F(9, 64)]
    row = series_table(builtin("sub-2-3"), 1)[1]
    assert (row.perimeter, row.area) == (F(8, 3), F(2, 9))
    assert len(series_table(builtin("koch-square"), 0)) == 1
    row = series_table(builtin("sierpinski-carpet"), 3)[3]
    assert (row.perimeter, row.area) == (F(2048, 27), F(512, 729))
    row = series_table(builtin("koch-square"), 1)[1]
    assert (row.perimeter, row.area, row.element_count) == (F(20, 3), F(13, 9), 20)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_row_invariants(name):
    spec = builtin(name)
    rows = series_table(spec, 6, cap=None)
    p = spec.params
    alpha, beta = F(p.n_pieces) / p.scale, F(p.n_pieces) / p.scale**2
    for prev, row in zip(rows, rows[1:]):
        assert row.perimeter == prev.perimeter * alpha
        if p.kind is ClassTag.SUBTRACTIVE:
            assert row.area == prev.area * beta
    for row in rows:
        assert row.element_count == spec.base_element_count * p.n_pieces**row.depth
        assert row.perimeter == row.element_count * row.element_length * spec.edge_factor


@pytest.mark.parametrize("name", ["koch-snowflake", "koch-square", "add-6-4"])
def test_additive_partial_sums_against_term_by_term(name):
    spec = builtin(name)
    basis = spec.area_basis()
    g = spec.rule
    u = G.unit_bump_area(g)
    edges = spec.base_element_count
    for n in range(7):
        closed = area_at_additive(basis, n)
        assert closed == additive_area_terms(basis.a0, basis.c, g.n_pieces, F(1, g.scale**2), n)
        assert closed == count_additive_area(basis.a0, edges, u, g.n_pieces, g.scale, n)
        if n:
            assert closed - area_at_additive(basis, n - 1) == basis.c * basis.beta ** (n - 1)


@given(
    st.fractions(min_value=F(1, 50), max_value=10, max_denominator=50),
    st.fractions(min_value=F(1, 50), max_value=10, max_denominator=50),
    st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50),
)
def test_limit_gap_shrinks(a0, c, beta):
    basis = AdditiveAreaBasis(QuadExt(a0), QuadExt(c), beta)
    limit = basis.a0 + basis.c / (1 - beta)
    gaps = [limit - area_at_additive(basis, n) for n in range(8)]
    for n, gap in enumerate(gaps):
        assert gap == basis.c * beta**n / (1 - beta)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_cap_is_enforced():
    with pytest.raises(CapExceeded):
        series_table(builtin("koch-snowflake"), 12)
    assert series_table(builtin("koch-snowflake"), 12, cap=None)[-1].element_count == 3 * 4**12
    assert 3 * 4**10 > DEFAULT_CAP > 3 * 4**9


def test_series_only_area_column_is_empty():
    rows = series_table(builtin("add-10-3"), 2)
    assert rows[0].area == 1 and rows[1].area is None
    csv_text = table_to_csv(rows)
    assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert csv_text.splitlines()[2].endswith(",,")


def test_csv_is_deterministic():
    spec = builtin("koch-snowflake")
    assert table_to_csv(series_table(spec, 5)) == table_to_csv(series_table(spec, 5))
    line = table_to_csv(series_table(spec, 1)).splitlines()[2]
    assert line == "1,12,1/3,4/1,4.000000000000,0/1+1/3*s3,0.577350269190"
