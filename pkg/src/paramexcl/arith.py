"""Arbitrary-precision interval enclosures with outward rounding.

Endpoints are MPFR numbers (through gmpy2).  Lower endpoints are always
computed in round-toward-minus-infinity mode and upper endpoints in
round-toward-plus-infinity mode, so every returned interval contains the
exact image of its arguments.  MPFR elementary functions are correctly
rounded, which makes the enclosures of ``exp``, ``log`` and ``sqrt`` as
tight as one ulp per endpoint.

The working precision travels with each value (``RInterval.prec``); there is
no ambient precision.  Binary operations run at the larger of the two operand
precisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpz

from .errors import (
    AmbiguousFloor,
    ArithOverflow,
    ArithUnderflow,
    DivisionByZeroInterval,
    DomainError,
    InvalidInput,
)

_LOG10_2 = math.log10(2)
_MIN_EXP_SPAN = 2**30


@dataclass(frozen=True)
class Precision:
    bits: int = 256
    exponent_range: tuple = (-(2**40), 2**40)

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < 64:
            raise InvalidInput(f"precision must be at least 64 bits, got {self.bits}")
        emin, emax = self.exponent_range
        if emin > -_MIN_EXP_SPAN or emax < _MIN_EXP_SPAN:
            raise InvalidInput("exponent range must span at least [-2^30, 2^30]")
        if emin < gmpy2.get_emin_min() or emax > gmpy2.get_emax_max():
            raise InvalidInput("exponent range exceeds what MPFR supports")

    def doubled(self) -> Precision:
        return Precision(2 * self.bits, self.exponent_range)

    @property
    def down(self):
        return _contexts(self.bits, *self.exponent_range)[0]

    @property
    def up(self):
        return _contexts(self.bits, *self.exponent_range)[1]

    @property
    def nearest(self):
        return _contexts(self.bits, *self.exponent_range)[2]


@lru_cache(maxsize=64)
def _contexts(bits, emin, emax):
    common = dict(precision=bits, emin=emin, emax=emax, subnormalize=False)
    return (
        gmpy2.context(round=gmpy2.RoundDown, **common),
        gmpy2.context(round=gmpy2.RoundUp, **common),
        gmpy2.context(round=gmpy2.RoundToNearest, **common),
    )


def _wider(p: Precision, q: Precision) -> Precision:
    return p if p.bits >= q.bits else q


def _exact_mpfr(n: int) -> mpfr:
    # Integers are converted at their own bit length so no rounding happens here.
    return mpfr(mpz(n), max(int(n).bit_length(), 2))


def _rational_endpoints(q: Fraction, prec: Precision):
    num, den = _exact_mpfr(q.numerator), _exact_mpfr(q.denominator)
    return prec.down.div(num, den), prec.up.div(num, den)


def _check(x: mpfr, prec: Precision) -> mpfr:
    if gmpy2.is_infinite(x) or gmpy2.is_nan(x):
        raise ArithOverflow(f"value exceeds the exponent range at {prec.bits} bits")
    if x != 0 and gmpy2.get_exp(x) <= prec.exponent_range[0] + 1:
        raise ArithUnderflow(f"value underflows the exponent range at {prec.bits} bits")
    return x


Scalar = Union[int, Fraction, str]


def to_fraction(value) -> Fraction:
    """Exact rational for ints, Fractions, decimal strings and mpfr values."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, mpz)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, type(mpfr(0))):
        num, den = value.as_integer_ratio()
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot convert {type(value).__name__} exactly; use int, Fraction or str")


@dataclass(frozen=True, slots=True)
class RInterval:
    lo: mpfr
    hi: mpfr
    prec: Precision

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise InvalidInput(f"malformed interval [{self.lo}, {self.hi}]")

    # ---------------------------------------------------------------- builders
    @classmethod
    def point(cls, value: Scalar, prec: Precision) -> RInterval:
        """Tightest enclosure of an exact rational (a point when representable)."""
        lo, hi = _rational_endpoints(to_fraction(value), prec)
        return cls(_check(lo, prec), _check(hi, prec), prec)

    @classmethod
    def hull(cls, lo: Scalar, hi: Scalar, prec: Precision) -> RInterval:
        a = cls.point(lo, prec)
        b = cls.point(hi, prec)
        return cls(a.lo, b.hi, prec)

    @classmethod
    def from_json(cls, data: dict, prec: Precision) -> RInterval:
        lo = prec.nearest.div(*map(_exact_mpfr, to_fraction(data["lo"]).as_integer_ratio()))
        hi = prec.nearest.div(*map(_exact_mpfr, to_fraction(data["hi"]).as_integer_ratio()))
        return cls(lo, hi, prec)

    def _lift(self, other) -> RInterval:
        if isinstance(other, RInterval):
            return other
        return RInterval.point(other, self.prec)

    def _make(self, lo, hi, prec) -> RInterval:
        return RInterval(_check(lo, prec), _check(hi, prec), prec)

    # ---------------------------------------------------------------- ring ops
    def __add__(self, other):
        o = self._lift(other)
        p = _wider(self.prec, o.prec)
        return self._make(p.down.add(self.lo, o.lo), p.up.add(self.hi, o.hi), p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        p = _wider(self.prec, o.prec)
        return self._make(p.down.sub(self.lo, o.hi), p.up.sub(self.hi, o.lo), p)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        neg = self.prec.nearest.minus  # exact: same precision as the operand
        return RInterval(neg(self.hi), neg(self.lo), self.prec)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RInterval(mpfr(0), max(self.prec.nearest.minus(self.lo), self.hi), self.prec)

    def __mul__(self, other):
        o = self._lift(other)
        p = _wider(self.prec, o.prec)
        d, u = p.down, p.up
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        return self._make(min(d.mul(a, b) for a, b in pairs), max(u.mul(a, b) for a, b in pairs), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.lo <= 0 <= o.hi:
            raise DivisionByZeroInterval(f"divisor {o} contains 0")
        p = _wider(self.prec, o.prec)
        d, u = p.down, p.up
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        return self._make(min(d.div(a, b) for a, b in pairs), max(u.div(a, b) for a, b in pairs), p)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def sqr(self) -> RInterval:
        """Square without the dependency blow-up of ``x * x``."""
        d, u = self.prec.down, self.prec.up
        if self.lo >= 0:
            return self._make(d.square(self.lo), u.square(self.hi), self.prec)
        if self.hi <= 0:
            return self._make(d.square(self.hi), u.square(self.lo), self.prec)
        return self._make(mpfr(0), u.square(max(u.minus(self.lo), self.hi)), self.prec)

    def __pow__(self, n):
        if isinstance(n, RInterval):
            return pow_real(self, n)
        if not isinstance(n, int):
            raise TypeError("integer exponent expected; use pow_real for real exponents")
        if n == 0:
            return RInterval.point(1, self.prec)
        if n < 0:
            return 1 / (self ** (-n))
        if n == 2:
            return self.sqr()
        d, u = self.prec.down, self.prec.up
        if n % 2:
            return self._make(d.pow(self.lo, n), u.pow(self.hi, n), self.prec)
        m = abs(self)
        return self._make(d.pow(m.lo, n), u.pow(m.hi, n), self.prec)

    # ---------------------------------------------------------------- queries
    def width(self) -> mpfr:
        return self.prec.up.sub(self.hi, self.lo)

    def mid(self) -> mpfr:
        return self.prec.nearest.div(self.prec.nearest.add(self.lo, self.hi), 2)

    def __float__(self):
        return float(self.mid())

    def contains(self, value) -> bool:
        if isinstance(value, RInterval):
            return self.lo <= value.lo and value.hi <= self.hi
        q = to_fraction(value)
        return to_fraction(self.lo) <= q <= to_fraction(self.hi)

    def __contains__(self, value):
        return self.contains(value)

    def intersects(self, other: RInterval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def subset(self, other: RInterval) -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def mig(self) -> mpfr:
        """Smallest absolute value over the interval."""
        return abs(self).lo

    def mag(self) -> mpfr:
        return max(self.prec.nearest.minus(self.lo), self.hi)

    def rounded(self, prec: Precision) -> RInterval:
        """Outward rounding to another precision."""
        return RInterval(prec.down.plus(self.lo), prec.up.plus(self.hi), prec)

    # ------------------------------------------------------------- formatting
    def to_json(self) -> dict:
        """Decimal endpoints rounded outward, so the text itself is an enclosure."""
        digits = math.ceil(self.prec.bits * _LOG10_2) + 2
        return {"lo": sci(self.lo, digits, "down"), "hi": sci(self.hi, digits, "up")}

    def __str__(self):
        return f"[{sci(self.lo, 17)}, {sci(self.hi, 17)}]"

    def __repr__(self):
        return f"RInterval({sci(self.lo, 17)}, {sci(self.hi, 17)}, bits={self.prec.bits})"


def sci(x: mpfr, digits: int, direction: str | None = None) -> str:
    """Decimal scientific string with ``digits`` significant digits.

    Rounds to nearest by default; ``direction`` "down" or "up" makes the
    string a lower or upper bound for ``x``.
    """
    if x == 0:
        return "0.0e+0"
    rnd = {None: gmpy2.RoundToNearest, "down": gmpy2.RoundDown, "up": gmpy2.RoundUp}[direction]
    # MPFR converts with the context rounding, floor/ceiling for down/up
    with gmpy2.context(gmpy2.get_context(), round=rnd):
        mant, exp10, _ = x.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    mant = mant.rstrip("0") or "0"
    frac = mant[1:] or "0"
    e = exp10 - 1
    return f"{sign}{mant[0]}.{frac}e{'+' if e >= 0 else '-'}{abs(e)}"


def ival(value, prec: Precision) -> RInterval:
    """Coerce a scalar or interval to an interval at ``prec``."""
    if isinstance(value, RInterval):
        return value
    return RInterval.point(value, prec)


# ------------------------------------------------------------ elementary functions
def exp(x: RInterval) -> RInterval:
    p = x.prec
    return x._make(p.down.exp(x.lo), p.up.exp(x.hi), p)


def log(x: RInterval) -> RInterval:
    if x.lo <= 0:
        raise DomainError(f"log of an interval reaching {x.lo}")
    p = x.prec
    return x._make(p.down.log(x.lo), p.up.log(x.hi), p)


def log1p(x: RInterval) -> RInterval:
    """log(1 + x), accurate for tiny x."""
    if x.lo <= -1:
        raise DomainError(f"log1p of an interval reaching {x.lo}")
    p = x.prec
    return x._make(p.down.log1p(x.lo), p.up.log1p(x.hi), p)


def sqrt(x: RInterval) -> RInterval:
    if x.lo < 0:
        raise DomainError(f"sqrt of an interval reaching {x.lo}")
    p = x.prec
    return x._make(p.down.sqrt(x.lo), p.up.sqrt(x.hi), p)


def pow_real(x: RInterval, y) -> RInterval:
    """x**y := exp(y ln x) for x > 0."""
    return exp(x._lift(y) * log(x))


def imin(a: RInterval, b) -> RInterval:
    b = a._lift(b)
    return RInterval(min(a.lo, b.lo), min(a.hi, b.hi), _wider(a.prec, b.prec))


def imax(a: RInterval, b) -> RInterval:
    b = a._lift(b)
    return RInterval(max(a.lo, b.lo), max(a.hi, b.hi), _wider(a.prec, b.prec))


def hull(a: RInterval, b: RInterval) -> RInterval:
    return RInterval(min(a.lo, b.lo), max(a.hi, b.hi), _wider(a.prec, b.prec))


def intersect(a: RInterval, b: RInterval) -> RInterval:
    """Common part of two enclosures of the same quantity."""
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        raise DomainError(f"disjoint enclosures {a} and {b}")
    return RInterval(lo, hi, _wider(a.prec, b.prec))


# ------------------------------------------------------------------- integer floors
def floor_int(x: RInterval) -> int:
    """The common floor of both endpoints; AmbiguousFloor if they differ."""
    a = math.floor(to_fraction(x.lo))
    b = math.floor(to_fraction(x.hi))
    if a != b:
        raise AmbiguousFloor(f"floor of {x} is {a} or {b}")
    return a


def _floor_log_exact(q: Fraction, base: int) -> int:
    n = math.floor((math.log2(q.numerator) - math.log2(q.denominator)) / math.log2(base))
    while Fraction(base) ** (n + 1) <= q:
        n += 1
    while Fraction(base) ** n > q:
        n -= 1
    return n


def floor_log(x: RInterval, base: int = 4) -> int:
    """floor(log_base x) for x > 0, decided by exact comparison with powers of base."""
    if x.lo <= 0:
        raise DomainError(f"log of an interval reaching {x.lo}")
    a = _floor_log_exact(to_fraction(x.lo), base)
    b = _floor_log_exact(to_fraction(x.hi), base)
    if a != b:
        raise AmbiguousFloor(f"floor(log_{base} {x}) is {a} or {b}")
    return a
