"""Built-in constructions and the JSON construction-file format.

File format (UTF-8 JSON object, unknown keys rejected)::

    {
      "name": "koch-snowflake",
      "class": "additive",             # or "subtractive"
      "N": 4,
      "r": 3,
      "base": "triangle",              # or "square"
      "generator": [[["0","0"],["0","0"]], ...],   # additive: N+1 vertices
      "mask": [[1,1,1],[1,0,1],[1,1,1]],           # subtractive grid, row 0 on top
      "series_only": {"a0": "1", "c": null}        # additive without geometry
    }

A coordinate is ``[a, b]`` meaning ``a + b*sqrt(3)`` with ``a``, ``b``
rational strings ``"p/q"``. A subtractive file with base ``"triangle"`` and
no mask is the three-corner triangle subdivision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, UnknownName, ValidationError
from .geometry import (
    ARCHETYPES,
    GeneratorTemplate,
    P,
    SeriesOnly,
    SubdivisionRule,
    base_polygon,
    bump_basis,
    polygon_perimeter_units,
    rule_violations,
    shoelace_points,
    template_violations,
)
from .params import ClassTag, ParamPoint
from .qfield import QuadExt, parse_rat, render_rat

BUILTIN = "builtin"


@dataclass(frozen=True)
class ConstructionSpec:
    name: str
    params: ParamPoint
    rule: GeneratorTemplate | SubdivisionRule | SeriesOnly
    base: str
    provenance: str = BUILTIN  # "builtin" or the source path

    @property
    def kind(self) -> ClassTag:
        return self.params.kind

    @property
    def realizable(self) -> bool:
        return not isinstance(self.rule, SeriesOnly)

    @property
    def base_element_count(self) -> int:
        """Segments of the base polygon (additive) or 1 initial piece (subtractive)."""
        if self.kind is ClassTag.SUBTRACTIVE:
            return 1
        return len(base_polygon(self.base))

    @property
    def base_edge_length(self) -> Fraction:
        return Fraction(1)

    @property
    def p0(self) -> QuadExt:
        return QuadExt(polygon_perimeter_units(base_polygon(self.base)))

    @property
    def a0(self) -> QuadExt:
        if isinstance(self.rule, SeriesOnly):
            return self.rule.a0
        return shoelace_points(base_polygon(self.base))

    @property
    def edge_factor(self) -> int:
        """Edges per element: 1 for chain segments, archetype edges for pieces."""
        if self.kind is ClassTag.SUBTRACTIVE:
            return len(ARCHETYPES[self.base])
        return 1

    def area_basis(self):
        if self.kind is not ClassTag.ADDITIVE:
            return None
        return bump_basis(self)


# ---------------------------------------------------------------------------
# built-ins

_third, _h = Fraction(1, 3), QuadExt(0, Fraction(1, 6))

KOCH_VERTICES = (P(0), P(_third), P(Fraction(1, 2), _h), P(2 * _third), P(1))
KOCH_SQUARE_VERTICES = (
    P(0),
    P(_third),
    P(_third, _third),
    P(2 * _third, _third),
    P(2 * _third),
    P(1),
)
ADD_6_4_VERTICES = (
    P(0),
    P(Fraction(1, 4)),
    P(Fraction(1, 2)),
    P(Fraction(1, 2), Fraction(1, 4)),
    P(Fraction(3, 4), Fraction(1, 4)),
    P(Fraction(3, 4)),
    P(1),
)

CARPET_MASK = ((1, 1, 1), (1, 0, 1), (1, 1, 1))
CORNERS_CENTER_MASK = ((1, 0, 1), (0, 1, 0), (1, 0, 1))
DIAGONAL_CORNERS_MASK = ((1, 0, 0), (0, 0, 0), (0, 0, 1))  # upper-left and lower-right


def _additive(name, n, r, base, vertices):
    return ConstructionSpec(
        name, ParamPoint(n, Fraction(r), ClassTag.ADDITIVE), GeneratorTemplate(vertices, r, n), base
    )


def _grid(name, n, r, mask):
    return ConstructionSpec(
        name,
        ParamPoint(n, Fraction(r), ClassTag.SUBTRACTIVE),
        SubdivisionRule("grid", r, n, mask),
        "square",
    )


def _make_builtins():
    specs = [
        ConstructionSpec(
            "sierpinski-triangle",
            ParamPoint(3, Fraction(2), ClassTag.SUBTRACTIVE),
            SubdivisionRule("triangle", 2, 3),
            "triangle",
        ),
        _grid("sierpinski-carpet", 8, 3, CARPET_MASK),
        _additive("koch-snowflake", 4, 3, "triangle", KOCH_VERTICES),
        _additive("koch-square", 5, 3, "square", KOCH_SQUARE_VERTICES),
        _grid("sub-2-3", 2, 3, DIAGONAL_CORNERS_MASK),
        _additive("add-6-4", 6, 4, "square", ADD_6_4_VERTICES),
        # zig-zag generator left unrealized: no A0/C pair beyond A0 = 1 is known
        ConstructionSpec(
            "add-10-3",
            ParamPoint(10, Fraction(3), ClassTag.ADDITIVE),
            SeriesOnly(QuadExt(1), None),
            "square",
        ),
        _grid("sub-5-3", 5, 3, CORNERS_CENTER_MASK),
    ]
    return {s.name: s for s in specs}


_BUILTINS = _make_builtins()
BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> ConstructionSpec:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise UnknownName(f"unknown construction {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None


# ---------------------------------------------------------------------------
# validation


def validate(spec: ConstructionSpec) -> list[str]:
    """All invariant violations of ``spec`` (empty list means ok)."""
    out = []
    p = spec.params
    if spec.base not in ("triangle", "square"):
        out.append(f"base must be 'triangle' or 'square', got {spec.base!r}")
        return out
    rule = spec.rule
    if isinstance(rule, GeneratorTemplate):
        if p.kind is not ClassTag.ADDITIVE:
            out.append("a generator template requires class 'additive'")
        if rule.n_pieces != p.n_pieces or Fraction(rule.scale) != p.scale:
            out.append("generator (N, r) disagree with the declared parameters")
        out.extend(template_violations(rule))
    elif isinstance(rule, SubdivisionRule):
        if p.kind is not ClassTag.SUBTRACTIVE:
            out.append("a subdivision rule requires class 'subtractive'")
        if rule.n_pieces != p.n_pieces or Fraction(rule.scale) != p.scale:
            out.append("subdivision (N, r) disagree with the declared parameters")
        want = "triangle" if rule.archetype == "triangle" else "square"
        if spec.base != want:
            out.append(f"{rule.archetype} subdivision needs base {want!r}")
        out.extend(rule_violations(rule))
    elif isinstance(rule, SeriesOnly):
        if p.kind is not ClassTag.ADDITIVE:
            out.append("series-only constructions must be additive")
        if rule.a0 <= 0:
            out.append("series-only a0 must be positive")
        if rule.c is not None and rule.c <= 0:
            out.append("series-only c must be positive")
    else:
        out.append(f"unsupported rule type {type(rule).__name__}")
    return out


def check(spec: ConstructionSpec) -> ConstructionSpec:
    violations = validate(spec)
    if violations:
        raise ValidationError(violations)
    return spec


# ---------------------------------------------------------------------------
# JSON

_KEYS = ("name", "class", "N", "r", "base", "generator", "mask", "series_only")


def _coord_json(q: QuadExt):
    return [render_rat(q.a), render_rat(q.b)]


def to_document(spec: ConstructionSpec) -> dict:
    p = spec.params
    doc = {
        "name": spec.name,
        "class": p.kind.value,
        "N": p.n_pieces,
        "r": p.scale.numerator if p.scale.denominator == 1 else render_rat(p.scale),
        "base": spec.base,
    }
    rule = spec.rule
    if isinstance(rule, GeneratorTemplate):
        doc["generator"] = [[_coord_json(v.x), _coord_json(v.y)] for v in rule.vertices]
    elif isinstance(rule, SubdivisionRule) and rule.mask is not None:
        doc["mask"] = [[int(c) for c in row] for row in rule.mask]
    elif isinstance(rule, SeriesOnly):
        doc["series_only"] = {
            "a0": rule.a0.render(),
            "c": rule.c.render() if rule.c is not None else None,
        }
    return doc


def serialize(spec: ConstructionSpec) -> str:
    """Deterministic JSON text: one key per line, one vertex or mask row per line."""
    lines = []
    for key, value in to_document(spec).items():
        if key in ("generator", "mask"):
            rows = ",\n".join("    " + json.dumps(v) for v in value)
            lines.append(f'  "{key}": [\n{rows}\n  ]')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def _rat_field(value, where):
    if isinstance(value, bool):
        raise ParseError(f"expected a rational, got {value!r}", where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return parse_rat(value)
        except ValueError as e:
            raise ParseError(str(e), where) from None
    raise ParseError(f"expected a rational string 'p/q', got {value!r}", where)


def _quad_field(value, where):
    from .qfield import parse as parse_quad

    if isinstance(value, list):
        if len(value) != 2:
            raise ParseError("a coordinate is [a, b] meaning a + b*sqrt3", where)
        return QuadExt(_rat_field(value[0], where + "[0]"), _rat_field(value[1], where + "[1]"))
    if isinstance(value, str):
        try:
            return parse_quad(value)
        except ValueError as e:
            raise ParseError(str(e), where) from None
    if isinstance(value, int) and not isinstance(value, bool):
        return QuadExt(value)
    raise ParseError(f"expected [a, b] or a Q(sqrt3) literal, got {value!r}", where)


def _int_field(doc, key):
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{key} must be an integer", key)
    return v


def from_document(doc, provenance="document") -> ConstructionSpec:
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", "$")
    unknown = sorted(set(doc) - set(_KEYS))
    if unknown:
        raise ParseError(f"unknown field(s): {', '.join(unknown)}", "$")
    for key in ("name", "class", "N", "r", "base"):
        if key not in doc:
            raise ParseError(f"missing required field {key!r}", "$")
    name = doc["name"]
    if not isinstance(name, str) or not name:
        raise ParseError("name must be a non-empty string", "name")
    try:
        kind = ClassTag.parse(doc["class"])
    except ValueError as e:
        raise ParseError(str(e), "class") from None
    n = _int_field(doc, "N")
    r = _rat_field(doc["r"], "r")
    base = doc["base"]
    if not isinstance(base, str):
        raise ParseError("base must be a string", "base")
    try:
        params = ParamPoint(n, r, kind)
    except (TypeError, ValueError) as e:
        raise ValidationError([str(e)]) from None

    present = [k for k in ("generator", "mask", "series_only") if k in doc]
    if len(present) > 1:
        raise ParseError(f"give exactly one rule, got {', '.join(present)}", "$")
    r_int = r.numerator if r.denominator == 1 else r
    if "generator" in doc:
        verts = doc["generator"]
        if not isinstance(verts, list):
            raise ParseError("generator must be a list of vertices", "generator")
        points = []
        for i, v in enumerate(verts):
            if not isinstance(v, list) or len(v) != 2:
                raise ParseError("a vertex is [x, y]", f"generator[{i}]")
            points.append(
                P(_quad_field(v[0], f"generator[{i}][0]"), _quad_field(v[1], f"generator[{i}][1]"))
            )
        rule = GeneratorTemplate(tuple(points), r_int, n)
    elif "mask" in doc:
        mask = doc["mask"]
        if not isinstance(mask, list) or not all(isinstance(row, list) for row in mask):
            raise ParseError("mask must be a list of rows", "mask")
        for i, row in enumerate(mask):
            for j, c in enumerate(row):
                if c not in (0, 1) or isinstance(c, float):
                    raise ParseError("mask entries are 0 or 1", f"mask[{i}][{j}]")
        rule = SubdivisionRule("grid", r_int, n, tuple(tuple(row) for row in mask))
    elif "series_only" in doc:
        so = doc["series_only"]
        if not isinstance(so, dict) or set(so) - {"a0", "c"} or "a0" not in so:
            raise ParseError("series_only is {a0, c}", "series_only")
        c = None if so.get("c") is None else _quad_field(so["c"], "series_only.c")
        rule = SeriesOnly(_quad_field(so["a0"], "series_only.a0"), c)
    elif kind is ClassTag.SUBTRACTIVE and base == "triangle":
        rule = SubdivisionRule("triangle", r_int, n)
    else:
        raise ParseError("missing rule: generator, mask or series_only", "$")
    return ConstructionSpec(name, params, rule, base, provenance)


def load_construction(document: str, provenance="document") -> ConstructionSpec:
    """Parse and validate a construction file body."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, f"line {e.lineno} column {e.colno}") from None
    return check(from_document(doc, provenance))


def load_construction_file(path) -> ConstructionSpec:
    with open(path, encoding="utf-8") as fh:
        return load_construction(fh.read(), provenance=str(path))


def resolve(name=None, path=None) -> ConstructionSpec:
    if path is not None:
        return load_construction_file(path)
    return builtin(name)
