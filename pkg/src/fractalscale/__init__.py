"""Perimeter and area scaling of self-similar fractal constructions.

Exact arithmetic throughout: rationals and the quadratic field Q(sqrt 3)
for the geometry, closed forms for the series, exact predicates for the
non-overlap checks.
"""

from .errors import (
    BrokenInvariant,
    CapExceeded,
    DegenerateGenerator,
    DegenerateSegment,
    FractalError,
    NotRealizable,
    ParseError,
    Unbounded,
    UnknownName,
    ValidationError,
)
from .params import ClassTag, ParamPoint, Regime, classify_regime, diagnose, similarity_dimension
from .qfield import SQRT3, QuadExt
from .registry import BUILTIN_NAMES, builtin

__version__ = "0.1.0"
