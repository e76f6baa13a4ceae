"""Auxiliary-constant chain and the checks (C1)-(C4).

Every constant is an ``RInterval``; the chain is evaluated in one of two
formula modes.  ``compat`` reproduces the published Maple worksheet token for
token, ``strict`` follows the displayed equations of the main text.  The two
differ only in ``D1``, ``gamma0``, ``tau`` and the second half of (C1).
"""

from __future__ import annotations

import enum
from contextlib import contextmanager
from dataclasses import dataclass, fields

from .arith import Precision, RInterval, exp, imax, imin, log, pow_real
from .errors import ChainSingularity, DivisionByZeroInterval, DomainError, InvalidEta, InvalidInput


class FormulaMode(str, enum.Enum):
    STRICT = "strict"
    COMPAT = "compat"


class Verdict(str, enum.Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    UNDECIDED = "undecided"

    @classmethod
    def of_margin(cls, margin: RInterval, strict: bool = True) -> Verdict:
        if margin.lo > 0 or (not strict and margin.lo >= 0):
            return cls.PROVED
        if margin.hi < 0 or (strict and margin.hi <= 0):
            return cls.REFUTED
        return cls.UNDECIDED

    def __and__(self, other: Verdict) -> Verdict:
        if Verdict.REFUTED in (self, other):
            return Verdict.REFUTED
        if Verdict.UNDECIDED in (self, other):
            return Verdict.UNDECIDED
        return Verdict.PROVED


@dataclass(frozen=True)
class StartingConstants:
    N: int
    delta: RInterval
    iota: RInterval
    C1: RInterval
    lam: RInterval
    alpha0: RInterval
    lambda0: RInterval
    # True when alpha0 was defined as log(1/delta)/N, so alpha0 >= log delta^(-1/N)
    # holds with equality by construction.
    alpha0_from_delta: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise InvalidInput("N must be a positive integer")
        if not (self.delta.lo > 0 and self.delta.hi < 1):
            raise InvalidInput("delta must lie in (0, 1)")
        if not (self.iota.lo > 0 and self.iota.hi < 1):
            raise InvalidInput("iota must lie in (0, 1)")
        for name in ("C1", "lam", "alpha0", "lambda0"):
            if not getattr(self, name).lo > 0:
                raise InvalidInput(f"{name} must be positive")


@dataclass(frozen=True)
class GeometryBounds:
    M1: RInterval
    M2: RInterval
    L1: RInterval
    L2: RInterval
    N1: int
    I_len: RInterval
    kappa: RInterval
    D2: RInterval
    D3: RInterval
    Ntilde: int

    def __post_init__(self):
        if self.L1.lo > self.L2.hi:
            raise InvalidInput("L1 must not exceed L2")
        if self.D2.hi < 1 or self.D3.hi < 1:
            raise InvalidInput("D2 and D3 must be at least 1")
        if not self.kappa.lo > 0:
            raise InvalidInput("kappa must be positive")
        if self.N1 < 1 or self.Ntilde < 1:
            raise InvalidInput("N1 and Ntilde must be positive integers")


@dataclass(frozen=True)
class FreeChoices:
    s_alpha1: RInterval
    s_gamma1: RInterval
    s_gamma2: RInterval

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v.lo > 0 and v.hi < 1):
                raise InvalidInput(f"{f.name} must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class AuxChain:
    alpha1: RInterval
    D1: RInterval
    gamma0: RInterval
    gamma1max: RInterval
    gamma1: RInterval
    gamma2: RInterval
    gamma: RInterval
    Dhat: RInterval
    Dhathat: RInterval
    Dist: RInterval
    Gamma1: RInterval
    k0: RInterval
    tau1: RInterval
    tau0: RInterval
    C3: RInterval
    C3tilde: RInterval
    gamma1min: RInterval
    tau: RInterval
    alpha: RInterval
    etatilde: RInterval
    eta: RInterval
    mode: FormulaMode = FormulaMode.COMPAT

    @property
    def alpha1_tau1(self) -> RInterval:
        return self.alpha1 * self.tau1

    def values(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "mode"}


@dataclass(frozen=True)
class ConditionRecord:
    name: str
    holds: Verdict
    margin: RInterval
    strict: bool = True


@dataclass(frozen=True)
class ConditionReport:
    records: tuple

    def __getitem__(self, name) -> ConditionRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def verdict(self) -> Verdict:
        v = Verdict.PROVED
        for r in self.records:
            v = v & r.holds
        return v

    def first_failure(self) -> ConditionRecord | None:
        """First record (canonical order) that is not proved."""
        for r in self.records:
            if r.holds is not Verdict.PROVED:
                return r
        return None


# Order in which failures are reported.
CANONICAL_ORDER = (
    "C1a",
    "C1a_floor",
    "C1b",
    "gamma1_in_range",
    "gamma2_in_range",
    "tau_positive",
    "alpha_denominator",
    "alpha_positive",
    "etatilde_below_one",
    "D3_positive",
    "C2",
    "C3",
    "C4",
)


@contextmanager
def _computing(field):
    try:
        yield
    except (DivisionByZeroInterval, DomainError) as exc:
        raise ChainSingularity(field, str(exc)) from exc


def _log_delta_inv(start: StartingConstants) -> RInterval:
    return -log(start.delta)


def evaluate_chain(
    start: StartingConstants,
    geom: GeometryBounds,
    choices: FreeChoices,
    mode: FormulaMode | str = FormulaMode.COMPAT,
    prec: Precision | None = None,
) -> AuxChain:
    mode = FormulaMode(mode)
    prec = prec or start.lam.prec
    one = RInterval.point(1, prec)
    euler = exp(one)

    lam, lam0, a0, C1, N = start.lam, start.lambda0, start.alpha0, start.C1, start.N
    L1, D2, D3, kappa = geom.L1, geom.D2, geom.D3, geom.kappa
    logd = _log_delta_inv(start)  # log delta^-1
    logdi = start.iota * logd  # log delta^-iota

    with _computing("alpha1"):
        alpha1 = choices.s_alpha1 * lam0 + (1 - choices.s_alpha1) * a0
    gap = alpha1 - a0

    with _computing("D1"):
        tail = exp(-gap * (geom.N1 + 1))
        if mode is FormulaMode.COMPAT:
            inner = 1 / (1 - exp(-alpha1)) + tail / (1 - tail) * (1 - exp(-gap))
        else:
            inner = exp(-alpha1) / (1 - exp(-alpha1)) + tail / ((1 - tail) * (1 - exp(-gap)))
        D1 = exp(kappa * inner)

    with _computing("gamma0"):
        lead = 1 if mode is FormulaMode.COMPAT else 2
        gamma0 = (lead + log(RInterval.point(2, prec)) + 5 * log(logd)) / logd

    with _computing("gamma1max"):
        gamma1max = imin(1 - gamma0, 1 - (log(1 / C1) + 2 * log(logdi)) / logdi)
    gamma1 = choices.s_gamma1 * gamma1max
    gamma2 = choices.s_gamma2 * (1 - gamma0 - gamma1)
    gamma = gamma0 + gamma1 + gamma2

    with _computing("Dhat"):
        lam_sum = exp(-lam) / (1 - exp(-lam))
        Dhat = 2 + 2 / C1 * D2 * D3 * lam_sum + 2 * D1 * D2 * D3 / L1.sqr() / (1 - exp(-gap))

    with _computing("Dhathat"):
        logdi2 = logdi.sqr()
        small = pow_real(start.delta, start.iota * (1 - gamma1)) / C1
        Dhathat = (2 + euler * (logdi2 / (logdi - 1).sqr())) * (logdi2 / (logdi2 - small)) / (logdi - 1)

    with _computing("Dist"):
        Dist = D2 * D3 * exp(kappa * (Dhat * Dhathat + D2 * D3 / C1 * lam_sum))

    with _computing("Gamma1"):
        Gamma1 = Dist * D1 * D2 * D3 * exp(1 + lam0) / (L1 * C1)

    with _computing("k0"):
        k0 = imax((log(D1 / L1) + lam0 + alpha1) / logdi, 0)
        tau1 = 2 / (lam0 + alpha1)
        tau0 = (2 + k0) / (lam0 + alpha1)

    with _computing("C3"):
        ratio = alpha1 / (lam0 + alpha1)
        C3 = pow_real(D1, -(lam0 + 2 * alpha1) / (lam0 + alpha1)) * pow_real(L1, 2 + ratio)
        a1t1 = alpha1 * tau1
        two = RInterval.point(2, prec)
        C3tilde = pow_real(two, a1t1 - 1) * L1.sqr() * C3 / (2 * D1.sqr() * Dist * D2 * D3)

    with _computing("gamma1min"):
        loglogdi = log(logdi)
        first = start.iota + (log(Dist * D2 * D3 / C1) + 2 * loglogdi) / logd
        second = a1t1 + (log(Gamma1 * D2 * D3 / C3tilde * exp(a1t1 - 1)) + 2 * loglogdi) / (start.iota * logd)
        gamma1min = imax(first, second)

    with _computing("tau"):
        loglog = loglogdi if mode is FormulaMode.COMPAT else log(logd)
        tau = tau0 / (1 - gamma1) * (1 + (log(geom.I_len) - log(Gamma1)) / logd + 2 * loglog / logd)

    with _computing("alpha"):
        alpha = imin(a0, (lam - lam0) / (tau * (lam - (1 - gamma1) / tau0) + 1))

    with _computing("etatilde"):
        co = 1 - gamma
        etatilde = exp(-gamma2 * alpha) * (1 + pow_real(start.delta, co) / (1 - exp(-co)))

    with _computing("eta"):
        eta = etatilde**N / (1 - etatilde)

    return AuxChain(
        alpha1=alpha1, D1=D1, gamma0=gamma0, gamma1max=gamma1max, gamma1=gamma1,
        gamma2=gamma2, gamma=gamma, Dhat=Dhat, Dhathat=Dhathat, Dist=Dist,
        Gamma1=Gamma1, k0=k0, tau1=tau1, tau0=tau0, C3=C3, C3tilde=C3tilde,
        gamma1min=gamma1min, tau=tau, alpha=alpha, etatilde=etatilde, eta=eta,
        mode=mode,
    )


def check_conditions(start: StartingConstants, geom: GeometryBounds, aux: AuxChain) -> ConditionReport:
    """Tri-state verdicts and margins for (C1)-(C4) plus structural range checks."""
    prec = aux.eta.prec
    logd = _log_delta_inv(start)
    logdi = start.iota * logd
    recs = {}

    def rec(name, margin, strict=True, verdict=None):
        v = Verdict.of_margin(margin, strict)
        recs[name] = ConditionRecord(name, v if verdict is None else verdict & v, margin, strict)

    rec("C1a", imin(start.lam - start.lambda0, start.lambda0 - start.alpha0))
    if start.alpha0_from_delta:
        # alpha0 = log(1/delta)/N exactly: the non-strict inequality is an identity.
        recs["C1a_floor"] = ConditionRecord("C1a_floor", Verdict.PROVED, RInterval.point(0, prec), False)
    else:
        rec("C1a_floor", start.alpha0 - logd / start.N, strict=False)
    cutoff = exp(-(1 + start.lambda0) / 2)
    rec("C1b", (logd if aux.mode is FormulaMode.COMPAT else logdi) - cutoff, strict=False)

    rec("gamma1_in_range", imin(aux.gamma1, aux.gamma1max - aux.gamma1))
    rec("gamma2_in_range", imin(aux.gamma2, 1 - aux.gamma0 - aux.gamma1 - aux.gamma2))
    rec("tau_positive", aux.tau)
    rec("alpha_denominator", start.lam - (1 - aux.gamma1) / aux.tau0)
    rec("alpha_positive", aux.alpha)
    etatilde_margin = 1 - aux.etatilde
    rec("etatilde_below_one", etatilde_margin)
    rec("D3_positive", geom.D3)

    rec("C2", 1 - aux.tau0 * start.alpha0)
    rec("C3", aux.gamma1 - aux.gamma1min, strict=False)
    # The closed form for eta is only a geometric-series sum when etatilde < 1.
    rec("C4", 1 - aux.eta, verdict=Verdict.of_margin(etatilde_margin))
    return ConditionReport(tuple(recs[name] for name in CANONICAL_ORDER))


def measure_bound(eta: RInterval, omega_len: RInterval) -> RInterval:
    """Certified lower bound (1 - eta)|Omega| for the measure of good parameters."""
    if not eta.hi < 1:
        raise InvalidEta(f"eta enclosure {eta} does not lie below 1")
    if not omega_len.lo > 0:
        raise InvalidInput("parameter window length must be positive")
    return (1 - eta) * omega_len
