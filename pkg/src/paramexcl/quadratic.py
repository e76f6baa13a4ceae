"""Starting constants and geometry bounds for f_a(x) = x^2 - a on [2 - eps, 2].

Every expression in a* = 2 - eps is rewritten in eps before evaluation
(``3 eps - eps^2``, ``4u - u^2`` with ``u = delta^2 + eps``), so no
catastrophic cancellation occurs even for eps = 10^-4990 at 256 bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import Precision, RInterval, exp, floor_log, log, log1p, pow_real, sqrt
from .chain import FormulaMode, GeometryBounds, StartingConstants
from .errors import DomainError, InvalidInput, NonResonanceFailure

# Default weight of lambda in lambda0 = (1 - w) alpha0 + w lambda.
LAMBDA0_MIX = Fraction(4, 5)


@dataclass(frozen=True)
class FamilyWindow:
    """Parameter window [2 - eps, 2]; eps is kept as an exact rational."""

    eps: Fraction

    def __post_init__(self):
        eps = Fraction(self.eps)
        object.__setattr__(self, "eps", eps)
        if not 0 < eps < 1:
            raise InvalidInput(f"eps must lie in (0, 1), got {float(eps):.3g}")

    @classmethod
    def from_exponent(cls, eps_exp: int) -> FamilyWindow:
        return cls(Fraction(1, 10**eps_exp))

    def eps_interval(self, prec: Precision) -> RInterval:
        return RInterval.point(self.eps, prec)

    def a_star(self, prec: Precision) -> RInterval:
        return RInterval.point(2 - self.eps, prec)

    def box(self, prec: Precision) -> RInterval:
        """All parameters of the window as one interval."""
        return RInterval.hull(2 - self.eps, 2, prec)

    def omega_len(self, prec: Precision) -> RInterval:
        return self.eps_interval(prec)


@dataclass(frozen=True)
class QuadraticSetup:
    window: FamilyWindow
    start: StartingConstants
    geom: GeometryBounds
    # Conditions whose confirmation needs the orbit module.
    pending: tuple = field(default=("A2", "A4"))


def expansivity_constants(delta: RInterval, iota: RInterval, eps: RInterval | FamilyWindow):
    """C1 and lambda of the expansivity estimate outside (-delta, delta).

    ``eps`` may be zero here (a* = 2 exactly); windows themselves never are.
    """
    if isinstance(eps, FamilyWindow):
        eps = eps.eps_interval(delta.prec)
    d2 = delta.sqr()
    C1 = sqrt((4 - pow_real(delta, 2 * iota)) / (4 - d2))
    # log(2 delta sqrt((4 - d2)/(4 - (d2 - a*)^2))) with 4 - (d2 - a*)^2 = u (4 - u), u = d2 + eps,
    # rearranged so ln 2 is the only O(1) term and delta cancels exactly
    s = eps / (4 - d2)
    if not s.hi < 1:
        raise DomainError("expansion radicand is not positive; delta is too small for this window")
    lam = log(RInterval.point(2, delta.prec)) - (log1p(eps / d2) + log1p(-s)) / 2
    return C1, lam


def escape_time_N(window: FamilyWindow, prec: Precision) -> int:
    """Largest n with 4^(n-1) (2 - a*^2 + a*) <= 1/4."""
    eps = window.eps_interval(prec)
    gap = 3 * eps - eps.sqr()  # 2 - a*^2 + a*
    if not (gap.lo > 0 and gap.hi < 1):
        raise DomainError("3 eps - eps^2 must lie in (0, 1)")
    n = floor_log(1 / gap, 4)
    if n < 1:
        raise DomainError("window too wide: escape time N is zero")
    return n


def base_rates(delta: RInterval, N: int, lam: RInterval, mix=LAMBDA0_MIX):
    """alpha0 = log(1/delta)/N and lambda0 = (1 - mix) alpha0 + mix lambda."""
    if N < 1:
        raise InvalidInput("N must be at least 1")
    alpha0 = -log(delta) / N
    mix = lam._lift(mix)
    lambda0 = (1 - mix) * alpha0 + mix * lam
    return alpha0, lambda0


def contraction_horizon_N1(delta: RInterval, iota: RInterval, N: int, mode=FormulaMode.COMPAT) -> int:
    if not (delta.lo > 0 and delta.hi < 1):
        raise InvalidInput("delta must lie in (0, 1)")
    d2 = delta.sqr()
    if FormulaMode(mode) is FormulaMode.COMPAT:
        n1 = floor_log((1 - pow_real(delta, iota)) / d2, 4)
    else:
        n1 = floor_log(1 / (2 * d2), 4)
    return min(n1, N - 1)


def nonresonance_tail(lambda0: RInterval, ntilde: int) -> RInterval:
    """e^(-lambda0 (n+1)) / (1 - e^(-lambda0))."""
    return exp(-lambda0 * (ntilde + 1)) / (1 - exp(-lambda0))


def parameter_derivative_bounds(lambda0: RInterval, N: int):
    """D2 and D3 from the a-priori growth (f^i)'(c0) >= 3^i, with Ntilde = N."""
    tail = nonresonance_tail(lambda0, N)
    denom = Fraction(1, 2) - tail
    if not denom.lo > 0:
        raise NonResonanceFailure("1/2 - tail is not positive")
    return Fraction(3, 2) + tail, 1 / denom


def quadratic_setup(
    delta: RInterval,
    iota: RInterval,
    window: FamilyWindow,
    prec: Precision,
    mode=FormulaMode.COMPAT,
    lambda0_mix=LAMBDA0_MIX,
) -> QuadraticSetup:
    if not (iota.lo > 0 and iota.hi < 1):
        raise InvalidInput("iota must lie in (0, 1)")
    if not (delta.lo > 0 and delta.hi < 1):
        raise InvalidInput("delta must lie in (0, 1)")
    C1, lam = expansivity_constants(delta, iota, window.eps_interval(prec))
    if not lam.lo > 0:
        raise DomainError("expansion rate lambda is not provably positive")
    N = escape_time_N(window, prec)
    alpha0, lambda0 = base_rates(delta, N, lam, lambda0_mix)
    start = StartingConstants(
        N=N, delta=delta, iota=iota, C1=C1, lam=lam, alpha0=alpha0, lambda0=lambda0,
        alpha0_from_delta=True,
    )
    N1 = contraction_horizon_N1(delta, iota, N, mode)
    if N1 < 1:
        raise DomainError("contraction horizon N1 is below 1")
    D2, D3 = parameter_derivative_bounds(lambda0, N)
    pt = lambda v: RInterval.point(v, prec)  # noqa: E731
    geom = GeometryBounds(
        M1=pt(4), M2=pt(2), L1=pt(Fraction(1, 2)), L2=pt(Fraction(1, 2)), N1=N1,
        I_len=pt(4), kappa=pt(1), D2=D2, D3=D3, Ntilde=N,
    )
    return QuadraticSetup(window=window, start=start, geom=geom)
