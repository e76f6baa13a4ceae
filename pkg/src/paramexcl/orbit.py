"""Rigorous iteration of the critical orbit of x^2 - a over a parameter window.

Conventions: c_0(a) = -a, c_{n+1} = c_n^2 - a, c'_0 = -1 and
c'_{n+1} = 2 c_n c'_n - 1.  dprod_n = prod_{j<n} 2 c_j is the space derivative
(f^n)'(c_0) and csum_n = 1 + sum_{i=1..n} 1/dprod_i.  Dividing the c' recursion
by dprod_{n+1} gives c'_n = -dprod_n * csum_n exactly, which every run checks.

Over the parameter box the naive interval step c^2 - a overestimates the
spread by a factor 5/3 from the first step on.  Each box value is therefore
intersected with a tighter enclosure: where c'_n keeps one sign over the box,
c_n is monotone in a and its image is the hull of the two endpoint orbits;
otherwise the mean-value form c_n(a*) + [0, eps] * c'_n(box) is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import Precision, RInterval, exp, hull, imax, imin, intersect, pow_real, sci
from .chain import Verdict
from .errors import (
    AmbiguousFloor,
    InvalidInput,
    NotFound,
    PrecisionExhausted,
    Undecided,
)
from .quadratic import FamilyWindow, QuadraticSetup, escape_time_N, nonresonance_tail

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def default_precision(eps_exp: int, delta_exp: int = 0) -> Precision:
    """Bits for eps = 10^-eps_exp (and delta^2 = 10^-2 delta_exp), with 40% slack."""
    digits = max(eps_exp, 2 * delta_exp)
    bits = math.ceil(digits * math.log2(10) * 1.445 / 1000) * 1000
    return Precision(max(bits, 1000))


@dataclass(frozen=True)
class OrbitStep:
    n: int
    c: RInterval
    dprod: RInterval
    csum: RInterval
    cprime: RInterval


@dataclass
class OrbitTrace:
    steps: list
    prec: Precision
    window: FamilyWindow | None = None
    # steps where |c'_n| and |csum_n dprod_n| failed to overlap (should stay empty)
    identity_failures: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps) - 1  # number of iterations

    def __getitem__(self, n) -> OrbitStep:
        return self.steps[n]

    @property
    def identity_ok(self) -> bool:
        return not self.identity_failures

    def dump(self, fh, digits: int = 20):
        """One line per step: n, c_n.lo, c_n.hi."""
        for s in self.steps:
            fh.write(f"{s.n}\t{sci(s.c.lo, digits)}\t{sci(s.c.hi, digits)}\n")


def _store(x: RInterval, store: Precision | None) -> RInterval:
    return x if store is None or store.bits >= x.prec.bits else x.rounded(store)


def _iterate(a: RInterval, n_max: int, anchors=None, seg=None, max_width=HALF, store=None) -> OrbitTrace:
    """Core loop; ``anchors`` (the box end points) and ``seg`` switch on the refinement."""
    if n_max < 1:
        raise InvalidInput("n_max must be at least 1")
    prec = a.prec
    one = RInterval.point(1, prec)
    c, cp, dprod, csum = -a, -one, one, one
    ends = None if anchors is None else [-x for x in anchors]
    steps = [OrbitStep(0, _store(c, store), dprod, csum, cp)]
    failures = []
    for n in range(1, n_max + 1):
        two_c = 2 * c
        cp = two_c * cp - 1
        dprod = dprod * two_c
        csum = csum + 1 / dprod
        c = c.sqr() - a
        if ends is not None:
            ends = [e.sqr() - x for e, x in zip(ends, anchors)]
            if cp.lo > 0 or cp.hi < 0:
                c = intersect(c, hull(*ends))  # monotone in a
            else:
                c = intersect(c, ends[0] + seg * cp)
        if max_width is not None and c.width() > max_width:
            raise PrecisionExhausted(f"c_{n} enclosure is wider than {float(max_width)} at {prec.bits} bits")
        if not abs(cp).intersects(abs(csum * dprod)):
            failures.append(n)
        steps.append(OrbitStep(n, _store(c, store), _store(dprod, store), _store(csum, store), _store(cp, store)))
    return OrbitTrace(steps, store or prec, None, failures)


def iterate_critical(window: FamilyWindow, n_max: int, prec: Precision, max_width=HALF, store=None) -> OrbitTrace:
    """Orbit over the whole parameter box [a*, 2]."""
    a = window.box(prec)
    seg = RInterval.hull(0, window.eps, prec)
    anchors = (window.a_star(prec), RInterval.point(2, prec))
    trace = _iterate(a, n_max, anchors=anchors, seg=seg, max_width=max_width, store=store)
    trace.window = window
    return trace


def iterate_point(a, n_max: int, prec: Precision, max_width=HALF, store=None) -> OrbitTrace:
    """Orbit at a single exact parameter value."""
    return _iterate(RInterval.point(a, prec), n_max, max_width=max_width, store=store)


def width_bound(window: FamilyWindow, n: int, prec: Precision) -> RInterval:
    """A-priori image width 4^(n-1) (3 eps - eps^2) plus rounding slack."""
    eps = window.eps_interval(prec)
    slack = RInterval.point(Fraction(4**n, 2 ** (prec.bits - 8)), prec)
    return RInterval.point(Fraction(4) ** (n - 1), prec) * (3 * eps - eps.sqr()) + slack


def verify_A3(trace: OrbitTrace, alpha0: RInterval, N: int) -> RInterval:
    """min over 0 <= m <= N of |c_m| - e^(-alpha0 max(m, 1)).

    |f^n(c)| = |c_{n-1}|, so covering m = 0..N with the exponent max(m, 1)
    checks every n in [1, N] (with a slightly stronger right-hand side).
    """
    if len(trace) < N:
        raise InvalidInput(f"trace has {len(trace)} steps, need {N}")
    margin = None
    for m in range(N + 1):
        term = abs(trace[m].c) - exp(-alpha0 * max(m, 1))
        margin = term if margin is None else imin(margin, term)
    return margin


@dataclass(frozen=True)
class Escape:
    ntilde: int
    range_len: RInterval  # 2 - c_ntilde(a*), a lower bound for |Omega_ntilde|
    astar_range: RInterval  # hull of c_n(a*) over 1 <= n <= N


def escape_at_astar(window: FamilyWindow, prec: Precision, n_limit: int | None = None) -> Escape:
    """Smallest n with certified 2 - c_n(a*) >= 1/4, by point iteration at a*."""
    N = escape_time_N(window, prec)
    n_limit = n_limit or 2 * N
    a = window.a_star(prec)
    c = -a
    seen = None
    for n in range(1, n_limit + 1):
        c = c.sqr() - a
        if c.width() > HALF:
            raise PrecisionExhausted(f"point orbit at a* lost all precision at n = {n}")
        if n <= N:
            seen = c if seen is None else hull(seen, c)
        gap = 2 - c
        if gap.lo >= QUARTER:
            return Escape(n, gap, seen if seen is not None else c)
        if gap.hi >= QUARTER:
            raise PrecisionExhausted(f"2 - c_{n}(a*) straddles 1/4")
    raise NotFound(n_limit)


def box_clearance(trace: OrbitTrace, upto: int, level: RInterval) -> RInterval:
    """min over m <= upto of |c_m| - level over the box."""
    margin = None
    for m in range(upto + 1):
        term = abs(trace[m].c) - level
        margin = term if margin is None else imin(margin, term)
    return margin


def find_Ntilde_escape(window: FamilyWindow, delta: RInterval, iota: RInterval, prec: Precision,
                       n_limit: int | None = None):
    """(ntilde, range_len) after confirming |c_m| >= delta^iota for all m <= ntilde.

    Raises PrecisionExhausted if the box enclosure cannot separate the orbit
    from (-delta^iota, delta^iota).
    """
    esc = escape_at_astar(window, prec, n_limit)
    trace = iterate_critical(window, esc.ntilde, prec, max_width=None, store=Precision(256))
    level = pow_real(delta, iota)
    if Verdict.of_margin(box_clearance(trace, esc.ntilde, level), strict=False) is not Verdict.PROVED:
        raise PrecisionExhausted("box orbit enters the critical neighbourhood before ntilde")
    return esc.ntilde, esc.range_len


def verify_A4_nonresonance(trace: OrbitTrace, ntilde: int, lambda0: RInterval):
    """(a4_margin, d2_direct, d3_direct); d3_direct is None unless a4 can be proved."""
    if ntilde < 1 or len(trace) < ntilde:
        raise InvalidInput(f"need a trace of at least ntilde = {ntilde} steps")
    tail = nonresonance_tail(lambda0, ntilde)
    low = high = None
    for k in range(1, ntilde + 1):
        s = trace[k].csum
        if s.lo <= 0 <= s.hi:
            raise Undecided(k)
        a = abs(s)
        low = a if low is None else imin(low, a)
        high = a if high is None else imax(high, a)
    last = trace[ntilde].csum
    a4_margin = 1 - abs(last - 1) - tail
    d2_direct = imax(high, abs(last) + tail)
    denom = imin(low, a4_margin)
    d3_direct = 1 / denom if denom.lo > 0 else None
    return a4_margin, d2_direct, d3_direct


def n1_margin(window: FamilyWindow, delta: RInterval, N1: int, prec: Precision) -> RInterval:
    """Enclosure of min over i <= N1 of dist(Delta_i, 0) - 1, Delta_0 = f(Delta).

    The lower end comes from the box iterate of Delta_0 = [-2, delta^2 - a*];
    the upper end from the orbit of the single point delta^2 - a* at a = a*,
    which belongs to every Delta_i.
    """
    if N1 < 1:
        raise InvalidInput("N1 must be at least 1")
    d2 = delta.sqr()
    if not d2.hi < 1:
        raise InvalidInput("delta^2 must be below 1")
    a_box = window.box(prec)
    astar = window.a_star(prec)
    x = RInterval((-a_box).lo, (d2 - a_box).hi, prec)
    pt = d2 - astar
    lower = upper = None
    box_alive = True
    for i in range(N1 + 1):
        if i:
            pt = pt.sqr() - astar
            if pt.width() > HALF:
                raise PrecisionExhausted(f"point iterate in the N1 check lost precision at i = {i}")
            if box_alive:
                x = x.sqr() - a_box
        if box_alive:
            lo_i = abs(x).lo - 1
            lower = lo_i if lower is None else min(lower, lo_i)
            box_alive = lo_i >= 0  # past this the box only keeps growing
        hi_i = abs(pt).hi - 1
        upper = hi_i if upper is None else min(upper, hi_i)
    lower = min(lower, upper)
    return RInterval(lower, upper, prec)


def verify_N1(window: FamilyWindow, delta: RInterval, N1: int, prec: Precision) -> Verdict:
    return Verdict.of_margin(n1_margin(window, delta, N1, prec), strict=False)


@dataclass(frozen=True)
class OrbitVerdicts:
    bits: int
    N: int
    ntilde: int
    range_len: RInterval
    a2_clearance: RInterval
    a2: Verdict
    a3_margin: RInterval
    a3: Verdict
    a4_margin: RInterval
    a4: Verdict
    d2_direct: RInterval
    d3_direct: RInterval | None
    d2_consistent: Verdict
    d3_consistent: Verdict
    n1_margin: RInterval
    n1_ok: Verdict
    astar_range: RInterval
    astar_ok: bool
    identity_ok: bool
    max_box_width: RInterval

    @property
    def verdict(self) -> Verdict:
        v = self.a2 & self.a3 & self.a4 & self.n1_ok & self.d2_consistent & self.d3_consistent
        if v is Verdict.PROVED and not (self.identity_ok and self.astar_ok):
            return Verdict.UNDECIDED
        return v


def verify_orbit(setup: QuadraticSetup, prec: Precision, store: Precision | None = Precision(256),
                 n_limit: int | None = None, dump=None) -> OrbitVerdicts:
    """All orbit-based checks for one quadratic setup at one precision."""
    window, start, geom = setup.window, setup.start, setup.geom
    N = start.N
    esc = escape_at_astar(window, prec, n_limit)
    n_run = max(N, esc.ntilde)
    trace = iterate_critical(window, n_run, prec, max_width=None, store=store)
    if dump is not None:
        trace.dump(dump)

    widest = None
    for s in trace.steps[1 : N + 1]:
        w = s.c.width()
        if w > HALF:
            raise PrecisionExhausted(f"c_{s.n} box enclosure wider than 1/2 at {prec.bits} bits")
        widest = w if widest is None or w > widest else widest
    widest = RInterval(widest, widest, trace.prec)

    level = pow_real(start.delta, start.iota)
    a2_clear = box_clearance(trace, esc.ntilde, level)
    a2 = Verdict.of_margin(a2_clear, strict=False) & Verdict.of_margin(esc.range_len - level, strict=False)
    if esc.ntilde < N:
        a2 = Verdict.REFUTED

    a3_margin = verify_A3(trace, start.alpha0, N)
    a4_margin, d2_direct, d3_direct = verify_A4_nonresonance(trace, esc.ntilde, start.lambda0)
    a4 = Verdict.of_margin(a4_margin)
    d2_ok = Verdict.of_margin(geom.D2 - d2_direct, strict=False)
    d3_ok = Verdict.of_margin(geom.D3 - d3_direct, strict=False) if d3_direct is not None else Verdict.UNDECIDED

    nm = n1_margin(window, start.delta, geom.N1, prec)
    astar = esc.astar_range
    return OrbitVerdicts(
        bits=prec.bits, N=N, ntilde=esc.ntilde, range_len=esc.range_len, a2_clearance=a2_clear, a2=a2,
        a3_margin=a3_margin, a3=Verdict.of_margin(a3_margin), a4_margin=a4_margin, a4=a4,
        d2_direct=d2_direct, d3_direct=d3_direct, d2_consistent=d2_ok, d3_consistent=d3_ok,
        n1_margin=nm, n1_ok=Verdict.of_margin(nm, strict=False),
        astar_range=astar, astar_ok=bool(astar.lo > Fraction(3, 2) and astar.hi <= 2),
        identity_ok=trace.identity_ok, max_box_width=widest,
    )


def verify_orbit_escalating(setup: QuadraticSetup, prec: Precision, retries: int = 3, **kw) -> OrbitVerdicts:
    """verify_orbit, doubling the precision on exhaustion up to ``retries`` times."""
    for attempt in range(retries + 1):
        try:
            v = verify_orbit(setup, prec, **kw)
        except (PrecisionExhausted, Undecided, AmbiguousFloor):
            if attempt == retries:
                raise
            prec = prec.doubled()
            continue
        if v.verdict is not Verdict.UNDECIDED or attempt == retries:
            return v
        prec = prec.doubled()
    raise AssertionError("unreachable")

