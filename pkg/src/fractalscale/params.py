"""(N, r) parameter space: growth ratios, similarity dimension, regimes, diagnosis.

Regime boundaries are decided with exact rational comparisons of ``N``
against ``r`` and ``r**2``; the similarity dimension is computed only for
display and never drives a branch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

import mpmath

from .qfield import QuadExt, to_decimal


class ClassTag(enum.Enum):
    ADDITIVE = "additive"
    SUBTRACTIVE = "subtractive"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise ValueError(f"class must be 'additive' or 'subtractive', got {text!r}") from None


class Regime(enum.Enum):
    SUBCRITICAL = "subcritical"
    INTERMEDIATE = "intermediate"
    SUPERCRITICAL = "supercritical"


class PerimeterVerdict(enum.Enum):
    TENDS_TO_ZERO = "tends_to_zero"
    CONSTANT = "constant"
    DIVERGENT = "divergent"


class AreaKind(enum.Enum):
    ZERO = "zero"
    CONSTANT_A0 = "constant_a0"
    FINITE = "finite"
    LINEAR_GROWTH = "linear_growth"
    DIVERGENT = "divergent"
    NOT_REALIZABLE = "not_realizable"


@dataclass(frozen=True)
class ParamPoint:
    """``n_pieces`` copies at scale ``1/scale``, with a construction class."""

    n_pieces: int
    scale: Fraction
    kind: ClassTag = ClassTag.ADDITIVE

    def __post_init__(self):
        if isinstance(self.n_pieces, bool) or not isinstance(self.n_pieces, int):
            raise TypeError("n_pieces must be an int")
        if self.n_pieces < 1:
            raise ValueError(f"N must be >= 1, got {self.n_pieces}")
        scale = Fraction(self.scale)
        if scale <= 1:
            raise ValueError(f"r must be > 1, got {scale}")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "kind", ClassTag.parse(self.kind))

    @property
    def N(self):
        return self.n_pieces

    @property
    def r(self):
        return self.scale


@dataclass(frozen=True)
class GrowthRatios:
    alpha: Fraction
    beta: Fraction


@dataclass(frozen=True)
class AreaLimit:
    """Asymptotic area outcome; ``value`` is set for FINITE/CONSTANT_A0, ``slope`` for LINEAR_GROWTH."""

    kind: AreaKind
    value: QuadExt | None = None
    slope: QuadExt | None = None
    conditional: bool = False


@dataclass(frozen=True)
class Diagnosis:
    params: ParamPoint
    ratios: GrowthRatios
    dimension: Decimal
    regime: Regime
    perimeter: PerimeterVerdict
    area: AreaLimit
    notes: tuple = field(default=())

    @property
    def conditional_on_nonoverlap(self):
        return self.area.conditional

    def to_json(self, digits=12):
        """Report object; see docs/schemas/diagnosis.schema.json."""
        area = {
            "verdict": self.area.kind.value,
            "exact": None,
            "decimal": None,
        }
        shown = self.area.value if self.area.value is not None else self.area.slope
        if shown is not None:
            area["exact"] = shown.render()
            area["decimal"] = to_decimal(shown, digits)
        return {
            "N": self.params.n_pieces,
            "r": str(self.params.scale),
            "class": self.params.kind.value,
            "alpha": str(self.ratios.alpha),
            "beta": str(self.ratios.beta),
            "dimension": float(self.dimension),
            "regime": self.regime.value,
            "perimeter": self.perimeter.value,
            "area": area,
            "conditional_on_nonoverlap": self.conditional_on_nonoverlap,
            "notes": list(self.notes),
        }


def growth_ratios(p: ParamPoint) -> GrowthRatios:
    return GrowthRatios(alpha=Fraction(p.n_pieces) / p.scale, beta=Fraction(p.n_pieces) / p.scale**2)


def dimension_value(p: ParamPoint, prec=60):
    """log N / log r as an mpmath float at ``prec`` decimal digits."""
    with mpmath.workdps(prec):
        r = mpmath.mpf(p.scale.numerator) / p.scale.denominator
        return mpmath.log(p.n_pieces) / mpmath.log(r)


def similarity_dimension(p: ParamPoint, digits: int = 3) -> Decimal:
    """Similarity dimension rounded half-even to ``digits`` decimals (display only)."""
    quantum = Decimal(1).scaleb(-digits)
    with mpmath.workdps(digits + 40):
        text = mpmath.nstr(dimension_value(p, digits + 40), digits + 30, strip_zeros=False)
    return Decimal(text).quantize(quantum, rounding=ROUND_HALF_EVEN)


def classify_regime(p: ParamPoint) -> Regime:
    return regime_for(p.n_pieces, p.scale)


def regime_for(n, r) -> Regime:
    """Regime of a rational point (N, r) of the plane; boundaries N = r and N = r**2."""
    n, r = Fraction(n), Fraction(r)
    if n <= r:
        return Regime.SUBCRITICAL
    if n < r * r:
        return Regime.INTERMEDIATE
    return Regime.SUPERCRITICAL


def perimeter_verdict(ratios: GrowthRatios) -> PerimeterVerdict:
    # alpha < 1 with fixed parameters always shrinks geometrically
    if ratios.alpha < 1:
        return PerimeterVerdict.TENDS_TO_ZERO
    if ratios.alpha == 1:
        return PerimeterVerdict.CONSTANT
    return PerimeterVerdict.DIVERGENT


def area_kind(p: ParamPoint) -> AreaKind:
    """Qualitative area outcome from (class, beta) alone."""
    beta = growth_ratios(p).beta
    if p.kind is ClassTag.SUBTRACTIVE:
        if beta < 1:
            return AreaKind.ZERO
        if beta == 1:
            return AreaKind.CONSTANT_A0
        return AreaKind.NOT_REALIZABLE
    if beta < 1:
        return AreaKind.FINITE
    if beta == 1:
        return AreaKind.LINEAR_GROWTH
    return AreaKind.DIVERGENT


def diagnose(p: ParamPoint, basis=None) -> Diagnosis:
    """Run the full perimeter/area diagnostic for ``p``.

    ``basis`` is an optional :class:`fractalscale.series.AdditiveAreaBasis`
    (initial area and first-iteration bump total). Without it a finite
    additive limit is still reported, but without a value.
    """
    from .series import area_limit

    ratios = growth_ratios(p)
    area = area_limit(p, basis)
    notes = []
    if area.conditional:
        notes.append("conditional_on_nonoverlap")
    if area.kind is AreaKind.FINITE and area.value is None:
        notes.append("positive finite limit; value needs a generator")
    if area.kind is AreaKind.DIVERGENT:
        notes.append("additive area-counting series diverges (bumps counted with multiplicity)")
    if p.n_pieces == 1:
        notes.append("N = 1 is a degenerate extension of the regime inequalities")
    return Diagnosis(
        params=p,
        ratios=ratios,
        dimension=similarity_dimension(p, 3),
        regime=classify_regime(p),
        perimeter=perimeter_verdict(ratios),
        area=area,
        notes=tuple(notes),
    )
