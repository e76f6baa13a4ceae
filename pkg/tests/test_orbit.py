import io
from fractions import Fraction

import pytest
from helpers import DESK_EPS_EXP, desk_setup
from hypothesis import given
from hypothesis import strategies as st
from oracle import critical_orbit_point

from paramexcl.arith import Precision, RInterval, to_fraction
from paramexcl.certificate import serialize_orbit
from paramexcl.chain import Verdict
from paramexcl.errors import InvalidInput, NotFound, PrecisionExhausted
from paramexcl.orbit import (
    default_precision,
    escape_at_astar,
    find_Ntilde_escape,
    iterate_critical,
    iterate_point,
    n1_margin,
    verify_A3,
    verify_A4_nonresonance,
    verify_N1,
    verify_orbit,
    verify_orbit_escalating,
    width_bound,
)
from paramexcl.quadratic import FamilyWindow, escape_time_N

DESK = FamilyWindow.from_exponent(DESK_EPS_EXP)
BITS = Precision(1000)


@pytest.fixture(scope="module")
def desk_trace():
    return iterate_critical(DESK, 166, BITS, max_width=None)


def test_fixed_point_at_a_equals_two():
    tr = iterate_point(2, 5, Precision(128))
    assert to_fraction(tr[0].c.lo) == -2
    for n in range(1, 6):
        assert to_fraction(tr[n].c.lo) == 2 and to_fraction(tr[n].c.hi) == 2
    assert tr[3].dprod.contains(-64)  # (2 * -2) * (2 * 2) * (2 * 2)
    assert tr[1].csum.contains(Fraction(3, 4))  # 1 + 1/(-4)
    assert tr.identity_ok
    assert len(tr) == 5


def test_derivative_identity_at_a_point():
    tr = iterate_point(Fraction(3, 2), 12, Precision(256))
    for s in tr.steps:
        assert s.cprime.intersects(-(s.dprod * s.csum))


def test_desk_box_contains_oracle_orbit_at_astar(desk_trace):
    ref = critical_orbit_point(2 - Fraction(1, 10**DESK_EPS_EXP), 166, 400)
    for n in range(167):
        assert _close(desk_trace[n].c, Fraction(*_mpf_ratio(ref[n])))


def _mpf_ratio(x):
    sign, man, e, _ = x._mpf_
    num = (-1) ** sign * int(man)
    return (num * 2**e, 1) if e >= 0 else (num, 2 ** (-e))


def _close(iv, q):
    # oracle rounding at 400 digits is far below the box width
    return to_fraction(iv.lo) - Fraction(1, 10**350) <= q <= to_fraction(iv.hi) + Fraction(1, 10**350)


def test_box_contains_both_endpoint_orbits(desk_trace):
    a_star = iterate_point(2 - DESK.eps, 166, BITS, max_width=None)
    a_two = iterate_point(2, 166, BITS)
    for n in range(167):
        assert a_star[n].c.intersects(desk_trace[n].c)
        assert desk_trace[n].c.contains(a_two[n].c)


def test_box_width_respects_a_priori_bound(desk_trace):
    for n in range(1, 166):
        assert desk_trace[n].c.width() <= width_bound(DESK, n, BITS).hi


def test_desk_escape_index(golden):
    esc = escape_at_astar(DESK, BITS)
    assert esc.ntilde == golden("oracle_small.json")["ntilde_eps100"] == 166
    assert esc.range_len.lo >= Fraction(1, 4)
    assert esc.astar_range.lo > Fraction(3, 2) and esc.astar_range.hi <= 2


def test_escape_not_found_within_limit():
    with pytest.raises(NotFound):
        escape_at_astar(DESK, BITS, n_limit=50)


def test_low_precision_exhausts_then_escalation_recovers():
    setup = desk_setup()
    with pytest.raises(PrecisionExhausted):
        verify_orbit(setup, Precision(128))
    v = verify_orbit_escalating(setup, Precision(128), retries=3)
    assert v.verdict is Verdict.PROVED
    assert v.bits in (256, 512, 1024)


def test_desk_verdicts():
    v = verify_orbit(desk_setup(), BITS)
    assert (v.N, v.ntilde) == (165, 166)
    for name in ("a2", "a3", "a4", "n1_ok", "d2_consistent", "d3_consistent"):
        assert getattr(v, name) is Verdict.PROVED, name
    assert v.identity_ok and v.astar_ok
    assert v.verdict is Verdict.PROVED
    assert v.max_box_width.hi < Fraction(1, 2)


def test_orbit_is_deterministic():
    a = serialize_orbit(verify_orbit(desk_setup(), BITS))
    b = serialize_orbit(verify_orbit(desk_setup(), BITS))
    assert a == b


def test_A3_refuted_when_orbit_sits_at_the_critical_point():
    # a = 1/10 keeps |c_n| near 0.1, far below e^(-alpha0 m) for alpha0 = 1/10
    tr = iterate_point(Fraction(1, 10), 5, Precision(128))
    margin = verify_A3(tr, RInterval.point(Fraction(1, 10), Precision(128)), 5)
    assert Verdict.of_margin(margin) is Verdict.REFUTED


def test_A3_holds_on_desk_box(desk_trace):
    alpha0 = desk_setup().start.alpha0
    assert Verdict.of_margin(verify_A3(desk_trace, alpha0, 165)) is Verdict.PROVED


def test_A4_needs_long_enough_trace(desk_trace):
    lam0 = desk_setup().start.lambda0
    with pytest.raises(InvalidInput):
        verify_A4_nonresonance(desk_trace, 500, lam0)
    margin, d2, d3 = verify_A4_nonresonance(desk_trace, 166, lam0)
    assert margin.lo > 0 and d3 is not None
    geom = desk_setup().geom
    assert d2.hi <= geom.D2.lo and d3.hi <= geom.D3.lo


def test_N1_at_N_is_not_proved():
    d = RInterval.point(Fraction(1, 10**20), BITS)
    assert verify_N1(DESK, d, 165, BITS) is not Verdict.PROVED
    setup = desk_setup()
    assert verify_N1(DESK, d, setup.geom.N1, BITS) is Verdict.PROVED
    assert n1_margin(DESK, d, setup.geom.N1, BITS).lo >= 0


def test_find_ntilde_checks_clearance():
    d = RInterval.point(Fraction(1, 10**20), BITS)
    ntilde, rng = find_Ntilde_escape(DESK, d, RInterval.point(Fraction(4, 5), BITS), BITS)
    assert ntilde == 166 and rng.lo >= Fraction(1, 4)


def test_trace_dump_format(desk_trace):
    buf = io.StringIO()
    desk_trace.dump(buf, digits=10)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 167
    n, lo, hi = lines[0].split("\t")
    assert n == "0" and float(lo) == pytest.approx(-2) and float(hi) == pytest.approx(-2)


def test_default_precision():
    assert default_precision(4990, 1000).bits == 24000
    assert default_precision(100).bits == 1000


@given(st.integers(40, 200))
def test_escape_after_N(eps_exp):
    window = FamilyWindow.from_exponent(eps_exp)
    prec = default_precision(eps_exp)
    esc = escape_at_astar(window, prec)
    assert esc.ntilde >= escape_time_N(window, prec)


def test_iterate_rejects_zero_steps():
    with pytest.raises(InvalidInput):
        iterate_point(1, 0, Precision(128))
