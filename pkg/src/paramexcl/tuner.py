"""Deterministic search for inputs that certify with the smallest eta.

The grid is walked lexicographically in field declaration order.  Budget left
over after the grid goes to coordinate descent from the best grid point: each
fraction field is nudged by +-step in declaration order, and all steps are
halved after a sweep without improvement.  Candidates are compared by eta.hi.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction

from .arith import Precision, RInterval, sci
from .chain import ConditionReport, FormulaMode, Verdict
from .config import FRACTION_FIELDS, DEFAULT, Inputs, decimal_str, run_check
from .errors import EmptySpace, InvalidInput, ParamExclError
from .orbit import default_precision, verify_orbit_escalating

MIN_STEP = Fraction(1, 2**20)


@dataclass(frozen=True)
class SearchSpace:
    delta_exp: tuple = (DEFAULT.delta_exp,)
    iota: tuple = (DEFAULT.iota,)
    eps_exp: tuple = (DEFAULT.eps_exp,)
    s_alpha1: tuple = (DEFAULT.s_alpha1,)
    s_gamma1: tuple = (DEFAULT.s_gamma1,)
    s_gamma2: tuple = (DEFAULT.s_gamma2,)
    s_lambda0: tuple = (DEFAULT.s_lambda0,)

    def __post_init__(self):
        for f in fields(self):
            vals = getattr(self, f.name)
            conv = int if f.name.endswith("_exp") else Fraction
            vals = tuple(sorted({conv(v) for v in vals}))
            object.__setattr__(self, f.name, vals)
            if conv is int and any(v < 1 for v in vals):
                raise InvalidInput(f"{f.name} values must be positive integers")
            if conv is Fraction and any(not 0 < v < 1 for v in vals):
                raise InvalidInput(f"{f.name} values must lie strictly inside (0, 1)")

    @classmethod
    def around(cls, base: Inputs = DEFAULT, **grids) -> SearchSpace:
        """Single-point space at ``base`` with some fields replaced by grids."""
        kw = {f.name: (getattr(base, f.name),) for f in fields(cls)}
        kw.update(grids)
        return cls(**kw)

    @property
    def size(self) -> int:
        n = 1
        for f in fields(self):
            n *= len(getattr(self, f.name))
        return n

    def candidates(self):
        names = [f.name for f in fields(self)]
        for combo in itertools.product(*(getattr(self, n) for n in names)):
            yield dict(zip(names, combo))

    def to_dict(self) -> dict:
        return {f.name: [str(v) if isinstance(v, int) else decimal_str(v) for v in getattr(self, f.name)]
                for f in fields(self)}


@dataclass(frozen=True)
class Candidate:
    inputs: Inputs
    eta: RInterval | None = None
    failure: str | None = None
    report: ConditionReport | None = None

    @property
    def ok(self) -> bool:
        return self.eta is not None

    def to_dict(self) -> dict:
        out = {"inputs": self.inputs.to_dict()}
        if self.ok:
            out["eta"] = self.eta.to_json()
        else:
            out["failure"] = self.failure
        return out


def evaluate_candidate(inputs: Inputs, mode=FormulaMode.COMPAT, prec: Precision | None = None,
                       orbit: bool = False, orbit_prec: Precision | None = None) -> Candidate:
    """Chain and conditions (and optionally the orbit checks) for one input set."""
    try:
        res = run_check(inputs, mode, prec)
    except ParamExclError as exc:
        return Candidate(inputs, failure=_error_name(exc))
    first = res.report.first_failure()
    if first is not None:
        return Candidate(inputs, failure=first.name, report=res.report)
    if orbit:
        failure = _orbit_failure(res, orbit_prec)
        if failure:
            return Candidate(inputs, failure=failure, report=res.report)
    return Candidate(inputs, eta=res.chain.eta, report=res.report)


def _error_name(exc: Exception) -> str:
    name = type(exc).__name__
    fld = getattr(exc, "field", None)
    return f"{name}:{fld}" if fld else name


def _orbit_failure(res, orbit_prec) -> str | None:
    prec = orbit_prec or default_precision(res.inputs.eps_exp, res.inputs.delta_exp)
    try:
        v = verify_orbit_escalating(res.setup, prec)
    except ParamExclError as exc:
        return "orbit:" + _error_name(exc)
    if v.verdict is Verdict.PROVED:
        return None
    for name in ("a2", "a3", "a4", "n1_ok", "d2_consistent", "d3_consistent"):
        if getattr(v, name) is not Verdict.PROVED:
            return "orbit:" + name
    return "orbit:undecided"


def _eval_args(args):
    return evaluate_candidate(*args)


@dataclass
class TuneResult:
    best: Candidate | None
    frontier: list
    evaluated: int
    failures: Counter = field(default_factory=Counter)
    winner_orbit: object = None  # OrbitVerdicts of the winner in fast mode

    def to_dict(self, frontier_cap: int = 100) -> dict:
        out = {
            "evaluated": str(self.evaluated),
            "best": self.best.to_dict() if self.best else None,
            "frontier": [c.to_dict() for c in self.frontier[:frontier_cap]],
            "frontier_total": str(len(self.frontier)),
            "failures": {k: str(v) for k, v in sorted(self.failures.items())},
        }
        if self.winner_orbit is not None:
            out["winner_orbit_verdict"] = self.winner_orbit.verdict.value
        return out


def tune(space: SearchSpace, budget: int, mode=FormulaMode.COMPAT, prec: Precision | None = None,
         orbit: str = "off", workers: int | None = None, orbit_prec: Precision | None = None) -> TuneResult:
    """Grid search then coordinate descent, ``budget`` evaluations in total.

    orbit: "off" skips orbit checks, "winner" runs them once on the best
    candidate (fast mode), "all" runs them for every candidate.
    """
    if orbit not in ("off", "winner", "all"):
        raise InvalidInput(f"unknown orbit mode {orbit!r}")
    if budget < 1 or space.size == 0:
        raise EmptySpace("no candidate fits the search space and budget")
    mode = FormulaMode(mode)
    prec = prec or Precision(256)
    per_candidate_orbit = orbit == "all"

    seen = {}
    order = []

    def run_batch(batch):
        args = [(inp, mode, prec, per_candidate_orbit, orbit_prec) for inp in batch]
        if workers and workers > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(_eval_args, args))
        else:
            results = [_eval_args(a) for a in args]
        for inp, cand in zip(batch, results):
            seen[inp] = cand
            order.append(cand)

    run_batch([Inputs(**raw) for raw in itertools.islice(space.candidates(), budget)])

    left = budget - len(order)
    best = _best(order)
    if best is not None and left > 0:
        left = _descend(space, best, left, seen, order, run_batch)

    frontier = sorted((c for c in order if c.ok), key=lambda c: c.eta.hi)
    best = frontier[0] if frontier else None
    failures = Counter(c.failure for c in order if not c.ok)
    result = TuneResult(best, frontier, len(order), failures)
    if orbit == "winner" and best is not None:
        res = run_check(best.inputs, mode, prec)
        op = orbit_prec or default_precision(best.inputs.eps_exp, best.inputs.delta_exp)
        result.winner_orbit = verify_orbit_escalating(res.setup, op)
    return result


def _best(cands) -> Candidate | None:
    ok = [c for c in cands if c.ok]
    return min(ok, key=lambda c: c.eta.hi) if ok else None


def _grid_step(values) -> Fraction:
    if len(values) > 1:
        return min(b - a for a, b in zip(values, values[1:]))
    return Fraction(1, 20)


def _descend(space, best, left, seen, order, run_batch) -> int:
    steps = {name: _grid_step(getattr(space, name)) for name in FRACTION_FIELDS}
    while left > 0 and max(steps.values()) >= MIN_STEP:
        improved = False
        for name in FRACTION_FIELDS:
            for sign in (1, -1):
                if left <= 0:
                    return left
                value = getattr(best.inputs, name) + sign * steps[name]
                if not 0 < value < 1:
                    continue
                inp = best.inputs.with_(**{name: value})
                if inp in seen:
                    continue
                run_batch([inp])
                left -= 1
                cand = seen[inp]
                if cand.ok and cand.eta.hi < best.eta.hi:
                    best, improved = cand, True
        if not improved:
            steps = {k: v / 2 for k, v in steps.items()}
    return left


def summary_line(c: Candidate) -> str:
    if c.ok:
        return f"eta <= {sci(c.eta.hi, 12)}  {c.inputs.to_dict()}"
    return f"failed at {c.failure}  {c.inputs.to_dict() if c.inputs else ''}"
