"""Exact input configurations and the check pipeline shared by tuner and CLI."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction

from .arith import Precision, RInterval, to_fraction
from .chain import AuxChain, ConditionReport, FormulaMode, FreeChoices, Verdict, check_conditions, evaluate_chain
from .errors import AmbiguousFloor, InvalidInput
from .quadratic import FamilyWindow, QuadraticSetup, quadratic_setup

FRACTION_FIELDS = ("iota", "s_alpha1", "s_gamma1", "s_gamma2", "s_lambda0")


@dataclass(frozen=True)
class Inputs:
    """delta = 10^-delta_exp and eps = 10^-eps_exp; everything else exact rationals."""

    delta_exp: int = 1000
    iota: Fraction = Fraction(4, 5)
    eps_exp: int = 4990
    s_alpha1: Fraction = Fraction(1, 5)
    s_gamma1: Fraction = Fraction(17, 20)
    s_gamma2: Fraction = Fraction(4, 5)
    s_lambda0: Fraction = Fraction(4, 5)

    def __post_init__(self):
        for name in ("delta_exp", "eps_exp"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidInput(f"{name} must be a positive integer")
        for name in FRACTION_FIELDS:
            v = to_fraction(getattr(self, name))
            object.__setattr__(self, name, v)
            if not 0 < v < 1:
                raise InvalidInput(f"{name} must lie strictly inside (0, 1), got {v}")

    @property
    def delta(self) -> Fraction:
        return Fraction(1, 10**self.delta_exp)

    @property
    def window(self) -> FamilyWindow:
        return FamilyWindow.from_exponent(self.eps_exp)

    def choices(self, prec: Precision) -> FreeChoices:
        pt = lambda v: RInterval.point(v, prec)  # noqa: E731
        return FreeChoices(pt(self.s_alpha1), pt(self.s_gamma1), pt(self.s_gamma2))

    def with_(self, **changes) -> Inputs:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = str(v) if isinstance(v, int) else decimal_str(v)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> Inputs:
        kw = {}
        for f in fields(cls):
            if f.name in data and data[f.name] is not None:
                v = data[f.name]
                kw[f.name] = int(v) if f.name.endswith("_exp") else to_fraction(str(v))
        return cls(**kw)


DEFAULT = Inputs()


def decimal_str(q: Fraction) -> str:
    """Exact decimal text for a fraction with a terminating expansion."""
    q = Fraction(q)
    den, twos, fives = q.denominator, 0, 0
    while den % 2 == 0:
        den, twos = den // 2, twos + 1
    while den % 5 == 0:
        den, fives = den // 5, fives + 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    k = max(twos, fives)
    scaled = q * 10**k
    s = str(abs(scaled.numerator)).rjust(k + 1, "0")
    body = s if k == 0 else f"{s[:-k]}.{s[-k:]}"
    return ("-" if q < 0 else "") + body


def read_ini(path) -> dict:
    """``key = value`` lines with ``#`` comments; returns the raw strings."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",))
    with open(path, encoding="utf-8") as fh:
        parser.read_string("[root]\n" + fh.read())
    return {k.replace("-", "_"): v for k, v in parser["root"].items()}


@dataclass(frozen=True)
class CheckResult:
    inputs: Inputs
    mode: FormulaMode
    prec: Precision
    setup: QuadraticSetup
    chain: AuxChain
    report: ConditionReport


def run_check(inputs: Inputs, mode=FormulaMode.COMPAT, prec: Precision | None = None) -> CheckResult:
    """quadratic_setup -> evaluate_chain -> check_conditions."""
    prec = prec or Precision(256)
    mode = FormulaMode(mode)
    delta = RInterval.point(inputs.delta, prec)
    iota = RInterval.point(inputs.iota, prec)
    setup = quadratic_setup(delta, iota, inputs.window, prec, mode, inputs.s_lambda0)
    chain = evaluate_chain(setup.start, setup.geom, inputs.choices(prec), mode, prec)
    report = check_conditions(setup.start, setup.geom, chain)
    return CheckResult(inputs, mode, prec, setup, chain, report)


def run_check_escalating(inputs: Inputs, mode=FormulaMode.COMPAT, prec: Precision | None = None,
                         retries: int = 3) -> CheckResult:
    """run_check, doubling the precision while the outcome is undecided."""
    prec = prec or Precision(256)
    for attempt in range(retries + 1):
        try:
            res = run_check(inputs, mode, prec)
        except AmbiguousFloor:
            if attempt == retries:
                raise
        else:
            if res.report.verdict is not Verdict.UNDECIDED or attempt == retries:
                return res
        prec = prec.doubled()
    raise AssertionError("unreachable")
