"""Vectorized exact arithmetic on Z[sqrt 3] stored as pairs of integer arrays.

A value ``u + v*sqrt(3)`` is a pair ``(u, v)`` of numpy arrays. Arrays are
int64 while every intermediate provably fits; otherwise they are promoted
to ``dtype=object`` (Python ints), which is slower but still exact.
"""

import math
from functools import reduce

import numpy as np

SQRT3_F = math.sqrt(3.0)

# Coordinates below this magnitude keep every degree-2 expression used in the
# package (at most 32 * M**2) inside int64.
INT64_COORD_LIMIT = 1 << 28


def max_abs(*arrays):
    m = 0
    for a in arrays:
        if len(a):
            m = max(m, int(np.max(np.abs(a))))
    return m


def is_object(*arrays):
    return any(a.dtype == object for a in arrays)


def compact(*arrays, limit=INT64_COORD_LIMIT):
    """Return the arrays as int64 if they fit under ``limit``, else as object arrays."""
    if max_abs(*arrays) < limit:
        return tuple(np.asarray(a, dtype=np.int64) for a in arrays)
    return tuple(np.asarray(a, dtype=object) for a in arrays)


def promote(*arrays):
    return tuple(np.asarray(a, dtype=object) for a in arrays)


def zmul(p, q, r, s):
    """(p + q*sqrt3) * (r + s*sqrt3) componentwise."""
    return p * r + 3 * q * s, p * s + q * r


def gcd_all(arrays, den):
    """gcd of ``den`` and every entry of ``arrays``."""
    g = int(den)
    for a in arrays:
        if g == 1:
            break
        if not len(a):
            continue
        if a.dtype == object:
            g = reduce(math.gcd, (int(x) for x in a.tolist()), g)
        else:
            g = math.gcd(g, int(np.gcd.reduce(np.abs(a))))
    return g


def _int_sign(a):
    return (a > 0).astype(np.int8) - (a < 0).astype(np.int8)


def vsign(u, v):
    """Exact sign (-1, 0, 1 as int8) of ``u + v*sqrt(3)`` elementwise."""
    su = _int_sign(u)
    sv = _int_sign(v)
    out = np.where(su == 0, sv, su).astype(np.int8)
    opp = (su.astype(np.int16) * sv) < 0
    if not opp.any():
        return out
    idx = np.nonzero(opp)[0]
    uu, vv = u[idx], v[idx]
    if uu.dtype == object or vv.dtype == object:
        dom = np.array([int(a) * int(a) > 3 * int(b) * int(b) for a, b in zip(uu, vv)], dtype=bool)
    else:
        fu = np.abs(uu.astype(np.float64))
        fv = np.abs(vv.astype(np.float64)) * SQRT3_F
        diff = fu - fv
        dom = diff > 0
        unsure = np.abs(diff) <= 1e-12 * (fu + fv)
        if unsure.any():
            for k in np.nonzero(unsure)[0]:
                a, b = int(uu[k]), int(vv[k])
                dom[k] = a * a > 3 * b * b
    out[idx] = np.where(dom, su[idx], sv[idx])
    return out


def exact_sum(a):
    """Exact integer sum of an int64/object array (no silent int64 overflow)."""
    return sum(a.tolist())
