"""Closed-form perimeter and area sequences and their limits.

Perimeter: ``P_n = P_0 * alpha**n`` for both classes. Area: ``A_0 * beta**n``
for subtractive constructions and ``A_0 + C * sum_{k=1..n} beta**(k-1)``
for additive ones, where ``C`` is the total bump area added at iteration 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .config import DEFAULT_CAP, check_cap
from .params import AreaKind, AreaLimit, ClassTag, ParamPoint, growth_ratios
from .qfield import QuadExt, to_decimal


@dataclass(frozen=True)
class AdditiveAreaBasis:
    a0: QuadExt
    c: QuadExt | None
    beta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a0", QuadExt.coerce(self.a0))
        if self.c is not None:
            object.__setattr__(self, "c", QuadExt.coerce(self.c))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.a0 <= 0:
            raise ValueError("initial area must be positive")
        if self.c is not None and self.c <= 0:
            raise ValueError("bump constant C must be positive")


@dataclass(frozen=True)
class SeriesRow:
    depth: int
    element_count: int
    element_length: Fraction
    perimeter: QuadExt
    area: QuadExt | None


def perimeter_at(p: ParamPoint, p0, n: int) -> QuadExt:
    if n < 0:
        raise ValueError("depth must be >= 0")
    return QuadExt.coerce(p0) * growth_ratios(p).alpha**n


def area_at_subtractive(a0, beta, n: int) -> QuadExt:
    if n < 0:
        raise ValueError("depth must be >= 0")
    return QuadExt.coerce(a0) * Fraction(beta) ** n


def bump_sum(c: QuadExt, beta: Fraction, n: int) -> QuadExt:
    """``C * sum_{k=1..n} beta**(k-1)`` in closed form."""
    if beta == 1:
        return c * n
    return c * ((1 - beta**n) / (1 - beta))


def area_at_additive(basis: AdditiveAreaBasis, n: int) -> QuadExt:
    if n < 0:
        raise ValueError("depth must be >= 0")
    if n == 0:
        return basis.a0
    if basis.c is None:
        raise ValueError("bump constant C is unknown for this construction")
    return basis.a0 + bump_sum(basis.c, basis.beta, n)


def area_limit(p: ParamPoint, basis: AdditiveAreaBasis | None = None) -> AreaLimit:
    from .params import area_kind

    kind = area_kind(p)
    beta = growth_ratios(p).beta
    if kind is AreaKind.CONSTANT_A0:
        return AreaLimit(kind, value=basis.a0 if basis is not None else None)
    if kind is AreaKind.FINITE:
        value = None
        if basis is not None and basis.c is not None:
            value = basis.a0 + basis.c / (1 - beta)
        return AreaLimit(kind, value=value, conditional=True)
    if kind is AreaKind.LINEAR_GROWTH:
        slope = basis.c if basis is not None else None
        return AreaLimit(kind, slope=slope, conditional=True)
    return AreaLimit(kind)


def series_table(spec, max_depth: int, cap: int | None = DEFAULT_CAP) -> list[SeriesRow]:
    """Exact rows for depths ``0..max_depth``.

    ``spec`` is a :class:`fractalscale.registry.ConstructionSpec`; additive
    areas use the bump basis derived from its generator, so the table and
    the geometry engine share one source for ``C``.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    p = spec.params
    s0 = spec.base_element_count
    check_cap(s0 * p.n_pieces**max_depth, cap)

    ratios = growth_ratios(p)
    basis = spec.area_basis() if p.kind is ClassTag.ADDITIVE else None
    rows = []
    count, length = s0, spec.base_edge_length
    perimeter = QuadExt.coerce(spec.p0)
    area = QuadExt.coerce(spec.a0)
    bump = basis.c if basis is not None else None
    for n in range(max_depth + 1):
        if n > 0:
            count *= p.n_pieces
            length /= p.scale
            perimeter = perimeter * ratios.alpha
            if p.kind is ClassTag.SUBTRACTIVE:
                area = area * ratios.beta
            elif bump is not None:
                area = area + bump
                bump = bump * ratios.beta
            else:
                area = None
        rows.append(SeriesRow(n, count, length, perimeter, area))
    return rows


CSV_COLUMNS = (
    "n",
    "element_count",
    "element_length",
    "perimeter_exact",
    "perimeter_decimal",
    "area_exact",
    "area_decimal",
)


def row_to_dict(row: SeriesRow, digits=12) -> dict:
    return {
        "n": row.depth,
        "element_count": row.element_count,
        "element_length": f"{row.element_length.numerator}/{row.element_length.denominator}",
        "perimeter_exact": row.perimeter.render(),
        "perimeter_decimal": to_decimal(row.perimeter, digits),
        "area_exact": row.area.render() if row.area is not None else None,
        "area_decimal": to_decimal(row.area, digits) if row.area is not None else None,
    }


def table_to_csv(rows, digits=12) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        d = row_to_dict(row, digits)
        writer.writerow({k: ("" if v is None else v) for k, v in d.items()})
    return buf.getvalue()
