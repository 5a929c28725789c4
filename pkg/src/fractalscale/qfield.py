"""Exact arithmetic in the quadratic field Q(sqrt 3).

Every coordinate, squared length and area in the package is a :class:`QuadExt`
``a + b*sqrt(3)`` with ``a`` and ``b`` held as :class:`fractions.Fraction`
(always in lowest terms, so component equality is value equality).

Textual form, used by config files, CSV and point dumps::

    a_num/a_den                    e.g. 3/4
    a_num/a_den+b_num/b_den*s3     e.g. 1/4+-1/12*s3

The parser also accepts bare integers and a lone ``b*s3`` term.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

Rat = Fraction

_RAT = r"-?\d+(?:/\d+)?"
_TEXT_RE = re.compile(
    rf"^(?:(?P<a>{_RAT})(?:\+(?P<b>{_RAT})\*s3)?|(?P<b_only>{_RAT})\*s3)$"
)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rat(text: str) -> Fraction:
    """Parse ``p`` or ``p/q`` into a Fraction (raises ValueError)."""
    text = text.strip()
    if not re.fullmatch(_RAT, text):
        raise ValueError(f"not a rational literal: {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def render_rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class QuadExt:
    """Element ``a + b*sqrt(3)`` of Q(sqrt 3)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _as_fraction(a))
        object.__setattr__(self, "b", _as_fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def coerce(cls, value) -> "QuadExt":
        if isinstance(value, QuadExt):
            return value
        return cls(value, 0)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExt(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 3 b^2`` (zero only for the zero element)."""
        return self.a * self.a - 3 * self.b * self.b

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b)

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt 3)")
        return QuadExt(self.a / n, -self.b / n)

    def __truediv__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadExt(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        try:
            o = QuadExt.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def _cmp(self, other):
        return sign(self - QuadExt.coerce(other))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(3.0)

    # -- text -----------------------------------------------------------
    def render(self) -> str:
        """Canonical textual form (see module docstring)."""
        head = render_rat(self.a)
        if self.b == 0:
            return head
        return f"{head}+{render_rat(self.b)}*s3"

    __str__ = render

    def __repr__(self):
        return f"QuadExt({self.render()!r})"

    def pretty(self) -> str:
        """Human-oriented form such as ``2√3/5`` or ``1 + √3/2``."""
        parts = []
        if self.a != 0 or self.b == 0:
            parts.append(str(self.a))
        if self.b != 0:
            c = abs(self.b)
            num = "" if c.numerator == 1 else str(c.numerator)
            term = f"{num}√3" + ("" if c.denominator == 1 else f"/{c.denominator}")
            if parts:
                parts.append(("- " if self.b < 0 else "+ ") + term)
            else:
                parts.append(("-" if self.b < 0 else "") + term)
        return " ".join(parts)


SQRT3 = QuadExt(0, 1)
ZERO = QuadExt(0)
ONE = QuadExt(1)


def qe(a=0, b=0) -> QuadExt:
    return QuadExt(a, b)


def add(x: QuadExt, y: QuadExt) -> QuadExt:
    return x + y


def mul(x: QuadExt, y: QuadExt) -> QuadExt:
    return x * y


def inverse(x: QuadExt) -> QuadExt:
    return x.inverse()


def sign_parts(a, b) -> int:
    """Exact sign of ``a + b*sqrt(3)`` for rationals or integers ``a``, ``b``."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sa == 0 or sb == 0 or sa == sb:
        return sa or sb
    # opposite signs: the larger of a^2 and 3 b^2 wins (they never tie)
    return sa if a * a > 3 * b * b else sb


def sign(x: QuadExt) -> int:
    return sign_parts(x.a, x.b)


def to_decimal(x: QuadExt, digits: int) -> str:
    """Correctly rounded (half-even) decimal string with ``digits`` fractional digits."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    x = QuadExt.coerce(x)
    scale = 10**digits
    base = x.a * scale
    if x.b == 0:
        rounded = round(base)
    else:
        guard = 8
        while True:
            k = 10**guard
            s = math.isqrt(3 * (scale * k) ** 2)  # floor(sqrt3 * scale * k)
            lo = base + x.b * Fraction(s, k)
            hi = base + x.b * Fraction(s + 1, k)
            if lo > hi:
                lo, hi = hi, lo
            if round(lo) == round(hi):
                rounded = round(lo)
                break
            guard *= 2
    neg = rounded < 0
    body = str(abs(rounded)).rjust(digits + 1, "0")
    text = f"{body[:-digits]}.{body[-digits:]}"
    return ("-" if neg else "") + text


def parse(text: str) -> QuadExt:
    """Parse the textual form; raises ValueError on malformed input."""
    m = _TEXT_RE.match(text.strip().replace(" ", ""))
    if not m:
        raise ValueError(f"not a Q(sqrt3) literal: {text!r}")
    if m.group("b_only") is not None:
        return QuadExt(0, parse_rat(m.group("b_only")))
    a = parse_rat(m.group("a"))
    b = parse_rat(m.group("b")) if m.group("b") is not None else Fraction(0)
    return QuadExt(a, b)


def render(x: QuadExt) -> str:
    return QuadExt.coerce(x).render()
