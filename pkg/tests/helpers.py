"""Comparison helpers and the desk-scale setup shared by the test modules."""

from decimal import Decimal, localcontext
from fractions import Fraction

from paramexcl.arith import Precision, RInterval
from paramexcl.quadratic import FamilyWindow, quadratic_setup

# small enough to iterate in milliseconds, large enough that lambda > 0 needs delta^2 >> eps
DESK_DELTA_EXP, DESK_EPS_EXP = 20, 100


def mid(iv) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 100
        return (Decimal(iv["lo"]) + Decimal(iv["hi"])) / 2


def as_json(iv):
    return iv.to_json() if isinstance(iv, RInterval) else iv


def matches_oracle(iv, ref, rel=Decimal("1e-35")) -> bool:
    """Enclosure within relative distance ``rel`` of an oracle decimal string."""
    iv = as_json(iv)
    with localcontext() as ctx:
        ctx.prec = 100
        r = Decimal(str(ref))
        slack = abs(r) * Decimal(rel)
        return Decimal(iv["lo"]) <= r + slack and r - slack <= Decimal(iv["hi"])


def agrees_to_digits(iv, printed: str, digits: int) -> bool:
    """Enclosure within half a unit of the ``digits``-th significant digit of ``printed``."""
    iv = as_json(iv)
    p = Decimal(printed)
    with localcontext() as ctx:
        ctx.prec = 100
        half_unit = Decimal(5) * Decimal(10) ** (p.adjusted() - digits)
        return Decimal(iv["lo"]) >= p - half_unit and Decimal(iv["hi"]) <= p + half_unit


def desk_setup(prec=Precision(256), mode="compat"):
    pt = lambda v: RInterval.point(v, prec)  # noqa: E731
    return quadratic_setup(pt(Fraction(1, 10**DESK_DELTA_EXP)), pt(Fraction(4, 5)),
                           FamilyWindow.from_exponent(DESK_EPS_EXP), prec, mode)
