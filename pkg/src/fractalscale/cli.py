"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or flag error,
3 invalid construction (validation or parse error), 4 element cap
exceeded, 5 construction not realizable as geometry.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import geometry as G
from . import overlap as O
from . import registry as R
from . import render
from . import series as S
from .config import CAP_ENV, LabConfig, parse_cap
from .errors import CapExceeded, NotRealizable, ParseError, UnknownName, ValidationError
from .params import AreaKind, ClassTag, ParamPoint, diagnose
from .qfield import to_decimal

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_CAP = 4
EXIT_NOT_REALIZABLE = 5

FOOTNOTE = "* conditional on non-overlap of the added bumps (verified only to finite depth)"


class UsageError(Exception):
    """Bad flag combination detected after argparse accepted the flags."""


def _rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _cap(text):
    try:
        return parse_cap(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad cap: {text!r}") from None


def _mark(text):
    parts = text.split(",", 2)
    if len(parts) < 2:
        raise argparse.ArgumentTypeError("--mark expects N,r[,label]")
    try:
        n, r = Fraction(parts[0]), Fraction(parts[1])
        label = parts[2] if len(parts) == 3 else f"({parts[0]}, {parts[1]})"
        return render.RegimeMark(label, r, n)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"bad mark {text!r}: {e}") from None


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dump_json(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _spec(args) -> R.ConstructionSpec:
    if getattr(args, "construction", None) is None and getattr(args, "file", None) is None:
        raise UsageError("a construction is required (--construction NAME or --file PATH)")
    try:
        return R.resolve(args.construction, args.file)
    except OSError as e:
        raise UsageError(f"cannot read {args.file}: {e.strerror}") from None


# ---------------------------------------------------------------------------
# diagnose


def _area_text(d, digits=6):
    a = d.area
    star = " *" if a.conditional else ""
    if a.kind is AreaKind.FINITE:
        if a.value is None:
            return f"finite positive limit (value needs a generator){star}"
        return f"finite, limit {a.value.pretty()} ≈ {to_decimal(a.value, digits)}{star}"
    if a.kind is AreaKind.LINEAR_GROWTH:
        if a.slope is None:
            return f"linear growth{star}"
        return f"linear growth, slope {a.slope.pretty()} per iteration{star}"
    if a.kind is AreaKind.CONSTANT_A0:
        return f"constant {a.value.pretty()}" if a.value is not None else "constant A0"
    if a.kind is AreaKind.ZERO:
        return "tends to zero"
    if a.kind is AreaKind.NOT_REALIZABLE:
        return "not realizable (beta > 1 cannot occur for a subset of the initiator)"
    return "divergent"


def format_diagnosis(d, name=None) -> str:
    p = d.params
    head = f"construction {name}: " if name else ""
    lines = [
        f"{head}N = {p.n_pieces}, r = {p.scale}, class {p.kind.value}",
        f"alpha = N/r = {d.ratios.alpha}, beta = N/r^2 = {d.ratios.beta}",
        f"similarity dimension D = {d.dimension}",
        f"regime: {d.regime.value}",
        f"perimeter: {d.perimeter.value}",
        f"area: {_area_text(d)}",
    ]
    for note in d.notes:
        if note != "conditional_on_nonoverlap":
            lines.append(f"note: {note}")
    if d.conditional_on_nonoverlap:
        lines.append(FOOTNOTE)
    return "\n".join(lines) + "\n"


def cmd_diagnose(args, cfg):
    if args.construction is not None or args.file is not None:
        spec = _spec(args)
        p = spec.params
        given = (args.N, args.r, args.kind)
        if (args.N is not None and args.N != p.n_pieces) or (args.r is not None and args.r != p.scale):
            raise UsageError(f"-N/-r {given[:2]} disagree with construction {spec.name} ({p.n_pieces}, {p.scale})")
        if args.kind is not None and ClassTag.parse(args.kind) is not p.kind:
            raise UsageError(f"--class {args.kind} disagrees with construction {spec.name} ({p.kind.value})")
        d = diagnose(p, spec.area_basis())
        name = spec.name
    else:
        if args.N is None or args.r is None or args.kind is None:
            raise UsageError("diagnose needs -N, -r and --class, or a construction")
        try:
            p = ParamPoint(args.N, args.r, ClassTag.parse(args.kind))
        except (TypeError, ValueError) as e:
            raise UsageError(str(e)) from None
        d = diagnose(p)
        name = None
    if args.format == "json":
        out = d.to_json()
        if name is not None:
            out = {"construction": name, **out}
        sys.stdout.write(_dump_json(out))
    else:
        sys.stdout.write(format_diagnosis(d, name))
    return EXIT_OK


# ---------------------------------------------------------------------------
# series


def cmd_series(args, cfg):
    spec = _spec(args)
    if args.depth < 0:
        raise UsageError("--depth must be >= 0")
    rows = S.series_table(spec, args.depth, cfg.cap)
    if args.format == "json":
        p = spec.params
        doc = {
            "construction": spec.name,
            "N": p.n_pieces,
            "r": str(p.scale),
            "class": p.kind.value,
            "columns": list(S.CSV_COLUMNS),
            "rows": [S.row_to_dict(r) for r in rows],
        }
        sys.stdout.write(_dump_json(doc))
    else:
        sys.stdout.write(S.table_to_csv(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# iterate


def cmd_iterate(args, cfg):
    spec = _spec(args)
    if args.depth < 0:
        raise UsageError("--depth must be >= 0")
    if not spec.realizable:
        raise NotRealizable(f"{spec.name} is defined by its series only and has no geometry")
    row = S.series_table(spec, args.depth, cfg.cap)[-1]
    if spec.kind is ClassTag.ADDITIVE:
        chain = G.iterate_additive(spec, args.depth, cfg.cap)
        svg = render.render_chain(chain, title=f"{spec.name} depth {args.depth}")
        perimeter, area = G.measured_perimeter(chain), G.shoelace_area(chain)
        count, unit = len(chain), "segments"
        dump = G.dump_points(chain.points) if args.dump_points else None
    else:
        ps = G.iterate_subtractive(spec.rule, args.depth, cfg.cap)
        svg = render.render_pieces(ps, title=f"{spec.name} depth {args.depth}")
        perimeter, area = G.pieceset_measures(ps)
        count, unit = len(ps), "pieces"
        dump = G.dump_pieces(ps) if args.dump_points else None
    if args.out:
        _write(args.out, svg)
    if dump is not None:
        _write(args.dump_points, dump)
    p_ok = perimeter == row.perimeter
    a_ok = row.area is not None and area == row.area
    print(f"{spec.name} depth {args.depth}: {count} {unit}")
    print(f"measured perimeter {perimeter.pretty()} ≈ {to_decimal(perimeter, 12)} (series match: {'yes' if p_ok else 'no'})")
    print(f"measured area {area.pretty()} ≈ {to_decimal(area, 12)} (series match: {'yes' if a_ok else 'no'})")
    if args.out:
        print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify-overlap


def cmd_verify_overlap(args, cfg):
    spec = _spec(args)
    if spec.kind is not ClassTag.ADDITIVE:
        raise UsageError(f"{spec.name} is subtractive; overlap verification applies to additive constructions")
    if not spec.realizable:
        raise NotRealizable(f"{spec.name} is defined by its series only and has no geometry")
    if args.max_depth < 0:
        raise UsageError("--max-depth must be >= 0")
    reports = O.verify_nonoverlap(spec, args.max_depth, cfg.cap)
    ok = all(r.certified for r in reports)
    if args.format == "json":
        sys.stdout.write(_dump_json([r.to_json() for r in reports]))
    else:
        for r in reports:
            if r.skipped:
                status = "skipped"
            elif r.certified:
                status = "certified"
                if r.touching_points:
                    status += f" ({r.touching_points} isolated touching points)"
            else:
                status = "FAILED"
                if r.witness is not None:
                    status += f", segments {r.witness[0]} and {r.witness[1]} overlap"
                if r.area_matches_series is False:
                    status += ", area differs from series"
            print(f"depth {r.depth}: {status}")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# regime-plot and table


def cmd_regime_plot(args, cfg):
    marks = list(render.DEFAULT_MARKS) + list(args.mark or [])
    svg = render.render_regime_plot(marks)
    if args.out:
        _write(args.out, svg)
        print(f"wrote {args.out} ({len(marks)} marks)")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


TABLE_COLUMNS = ("name", "N", "r", "class", "alpha", "beta", "D", "regime", "perimeter", "area")


def _area_cell(d):
    a = d.area
    if a.kind in (AreaKind.FINITE, AreaKind.CONSTANT_A0) and a.value is not None:
        cell = a.value.pretty()
    elif a.kind is AreaKind.ZERO:
        cell = "0"
    else:
        cell = a.kind.value
    return cell + (" conditional" if a.conditional else "")


def table_rows():
    """One computed row per built-in construction."""
    rows = []
    for name in R.BUILTIN_NAMES:
        spec = R.builtin(name)
        d = diagnose(spec.params, spec.area_basis())
        rows.append((spec, d))
    return rows


def cmd_table(args, cfg):
    rows = table_rows()
    if args.format == "json":
        out = []
        for spec, d in rows:
            j = d.to_json()
            out.append({"name": spec.name, **j, "dimension": str(d.dimension)})
        sys.stdout.write(_dump_json(out))
        return EXIT_OK
    cells = [TABLE_COLUMNS]
    for spec, d in rows:
        p = d.params
        cells.append(
            (
                spec.name,
                str(p.n_pieces),
                str(p.scale),
                p.kind.value,
                str(d.ratios.alpha),
                str(d.ratios.beta),
                str(d.dimension),
                d.regime.value,
                d.perimeter.value,
                _area_cell(d),
            )
        )
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_COLUMNS))]
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    if any(d.conditional_on_nonoverlap for _, d in rows):
        print(FOOTNOTE.replace("* ", "conditional: ", 1))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--cap",
        type=_cap,
        default=argparse.SUPPRESS,
        help=f"max segments/pieces to build (0 or 'none' = unlimited; env {CAP_ENV})",
    )

    def construction(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--construction", "-c", metavar="NAME", help="built-in name: " + ", ".join(R.BUILTIN_NAMES))
        g.add_argument("--file", "-f", metavar="PATH", help="construction JSON file")

    ap = argparse.ArgumentParser(
        prog="fractalscale",
        description="Perimeter and area scaling of self-similar fractal constructions.",
        parents=[common],
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("diagnose", parents=[common], help="regime, perimeter and area verdicts")
    sp.add_argument("-N", type=int, help="number of pieces")
    sp.add_argument("-r", type=_rational, help="linear scale factor (rational)")
    sp.add_argument("--class", dest="kind", choices=[c.value for c in ClassTag])
    construction(sp)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("series", parents=[common], help="exact perimeter/area table")
    construction(sp)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("iterate", parents=[common], help="build the geometry and write an SVG")
    construction(sp)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--out", metavar="PATH.svg")
    sp.add_argument("--dump-points", metavar="PATH", help="write exact vertex coordinates")
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("verify-overlap", parents=[common], help="certify non-overlap to a finite depth")
    construction(sp)
    sp.add_argument("--max-depth", type=int, required=True)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_verify_overlap)

    sp = sub.add_parser("regime-plot", parents=[common], help="SVG of the (r, N) plane")
    sp.add_argument("--out", metavar="PATH.svg")
    sp.add_argument("--mark", type=_mark, action="append", metavar="N,r[,label]")
    sp.set_defaults(func=cmd_regime_plot)

    sp = sub.add_parser("table", parents=[common], help="summary of the built-in constructions")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_table)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)  # exits with status 2 on flag errors
    try:
        cfg = LabConfig.from_env()
    except ValueError as e:
        print(f"error: {CAP_ENV}: {e}", file=sys.stderr)
        return EXIT_USAGE
    if hasattr(args, "cap"):
        cfg = LabConfig(cap=args.cap)
    try:
        return args.func(args, cfg)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownName as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print("error: invalid construction", file=sys.stderr)
        for v in e.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_INVALID
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except CapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except NotRealizable as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_REALIZABLE


if __name__ == "__main__":
    sys.exit(main())
