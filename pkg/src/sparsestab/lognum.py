"""Reals that may overflow double precision, kept as (sign, log10) pairs.

A value is either a plain ``float`` (when it fits comfortably in double range)
or a :class:`LogReal` whose ``log10`` field is itself such a value. Nesting
lets towers like ``L ** R`` with ``R`` around ``10**(10**6)`` stay finite.

All helpers accept ints, floats and ``LogReal`` and return the normalised
form. Precision is that of the innermost float, so adding a quantity that is
negligible at that precision leaves the larger one unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

BIG = 1e300
TINY = 1e-300


@dataclass(frozen=True)
class LogReal:
    sign: int
    log10: "Real"

    def __repr__(self) -> str:
        return f"LogReal({'+' if self.sign > 0 else '-'}10^{self.log10!r})"

    # operator sugar so user-supplied functions can do simple arithmetic
    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __pow__(self, y):
        return power(self, y)

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __float__(self) -> float:
        return to_float(self)


Real = Union[float, LogReal]


def _fits(x: float) -> bool:
    return x == 0.0 or TINY <= abs(x) <= BIG


def normalize(x) -> Real:
    if isinstance(x, LogReal):
        if x.sign == 0:
            return 0.0
        lg = normalize(x.log10)
        if isinstance(lg, float) and -300.0 <= lg <= 300.0:
            return x.sign * 10.0**lg
        return LogReal(x.sign, lg)
    if isinstance(x, int):
        if x == 0:
            return 0.0
        if abs(x) <= 10**300:
            return float(x)
        return LogReal(1 if x > 0 else -1, math.log10(abs(x)))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise OverflowError("non-finite float cannot be represented")
    return x if _fits(x) else LogReal(1 if x > 0 else -1, math.log10(abs(x)))


def sign(x: Real) -> int:
    x = normalize(x)
    if isinstance(x, LogReal):
        return x.sign
    return (x > 0) - (x < 0)


def log10abs(x: Real) -> Real:
    x = normalize(x)
    if isinstance(x, LogReal):
        return x.log10
    if x == 0:
        raise ValueError("log of zero")
    return math.log10(abs(x))


def neg(x: Real) -> Real:
    x = normalize(x)
    if isinstance(x, LogReal):
        return LogReal(-x.sign, x.log10)
    return -x


def from_log10(sgn: int, lg: Real) -> Real:
    return normalize(LogReal(sgn, lg))


def compare(x: Real, y: Real) -> int:
    x, y = normalize(x), normalize(y)
    if isinstance(x, float) and isinstance(y, float):
        return (x > y) - (x < y)
    sx, sy = sign(x), sign(y)
    if sx != sy:
        return (sx > sy) - (sx < sy)
    if sx == 0:
        return 0
    c = compare(log10abs(x), log10abs(y))
    return c if sx > 0 else -c


def mul(x: Real, y: Real) -> Real:
    x, y = normalize(x), normalize(y)
    if isinstance(x, float) and isinstance(y, float):
        p = x * y
        if _fits(p) and not (p == 0 and x != 0 and y != 0):
            return p
    sx, sy = sign(x), sign(y)
    if sx == 0 or sy == 0:
        return 0.0
    return from_log10(sx * sy, add(log10abs(x), log10abs(y)))


def div(x: Real, y: Real) -> Real:
    x, y = normalize(x), normalize(y)
    if sign(y) == 0:
        raise ZeroDivisionError("division by zero")
    if isinstance(x, float) and isinstance(y, float):
        p = x / y
        if _fits(p) and not (p == 0 and x != 0):
            return p
    sx = sign(x)
    if sx == 0:
        return 0.0
    return from_log10(sx * sign(y), add(log10abs(x), neg(log10abs(y))))


def add(x: Real, y: Real) -> Real:
    x, y = normalize(x), normalize(y)
    if isinstance(x, float) and isinstance(y, float):
        s = x + y
        if not math.isinf(s):
            return normalize(s)
    if sign(x) == 0:
        return y
    if sign(y) == 0:
        return x
    lx, ly = log10abs(x), log10abs(y)
    if compare(lx, ly) < 0:
        x, y, lx, ly = y, x, ly, lx
    gap = normalize(add(ly, neg(lx)))  # <= 0
    if isinstance(gap, float) and gap > -40.0:
        factor = 1.0 + sign(x) * sign(y) * 10.0**gap
        if factor == 0.0:
            return 0.0
        return from_log10(sign(x), add(lx, math.log10(factor)))
    return x


def power(x: Real, y: Real) -> Real:
    """x ** y for positive x."""
    x = normalize(x)
    if sign(x) <= 0:
        raise ValueError("power needs a positive base")
    y = normalize(y)
    if isinstance(x, float) and isinstance(y, float):
        try:
            p = x**y
        except OverflowError:
            p = math.inf
        if _fits(p) and p != 0:
            return p
    return from_log10(1, mul(y, log10abs(x)))


def minimum(*xs: Real) -> tuple[Real, int]:
    """Smallest value and the index of its first occurrence."""
    best = 0
    for j in range(1, len(xs)):
        if compare(xs[j], xs[best]) < 0:
            best = j
    return normalize(xs[best]), best


def to_float(x: Real) -> float:
    x = normalize(x)
    if isinstance(x, float):
        return x
    lg = normalize(x.log10)
    return x.sign * (math.inf if sign(lg) > 0 else 0.0)


def close(x: Real, y: Real, rel: float = 1e-9) -> bool:
    """Equality up to ``rel`` relative error on log10 |.| (signs must agree)."""
    x, y = normalize(x), normalize(y)
    if sign(x) != sign(y):
        return False
    if sign(x) == 0:
        return True
    lx, ly = log10abs(x), log10abs(y)
    gap = add(lx, neg(ly))
    scale = max(abs_(lx), abs_(ly), 1.0, key=_key)
    return compare(abs_(gap), mul(rel, scale)) <= 0


def abs_(x: Real) -> Real:
    return neg(x) if sign(x) < 0 else normalize(x)


class _key:
    """Sort key adaptor for ``max``/``min`` over mixed reals."""

    def __init__(self, x):
        self.x = x

    def __lt__(self, other):
        return compare(self.x, other.x) < 0


def to_json(x: Real) -> dict:
    """Nested ``{"sign": s, "log10": ...}``; the innermost log10 is a number."""
    x = normalize(x)
    s = sign(x)
    if s == 0:
        return {"sign": 0, "log10": None}
    lg = log10abs(x)
    return {"sign": s, "log10": lg if isinstance(lg, float) else to_json(lg)}


def from_json(d: dict) -> Real:
    if d["sign"] == 0:
        return 0.0
    lg = d["log10"]
    return from_log10(d["sign"], lg if isinstance(lg, (int, float)) else from_json(lg))


def to_str(x: Real, digits: int = 6) -> str:
    x = normalize(x)
    if isinstance(x, float):
        return f"{x:.{digits}g}"
    return f"{'-' if x.sign < 0 else ''}10^({to_str(x.log10, digits)})"
