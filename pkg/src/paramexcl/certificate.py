"""Certificate assembly (JSON-ready dicts) and the plain-text report.

All real numbers are written as decimal scientific strings ``{"lo", "hi"}``;
integers stay integers.  Nothing time- or host-dependent goes in, so equal
flags give byte-identical output.
"""

from __future__ import annotations

import decimal
import json
from dataclasses import dataclass, fields

from .arith import Precision, RInterval
from .chain import AuxChain, ConditionReport, GeometryBounds, StartingConstants, Verdict, measure_bound
from .config import Inputs, run_check_escalating
from .errors import NonResonanceFailure, NotFound, ParamExclError
from .orbit import OrbitVerdicts, default_precision, verify_orbit_escalating
from .quadratic import nonresonance_tail

SCHEMA_VERSION = "1"

NOTES = (
    "The stated coefficient 0.97 in |Omega*| >= 0.97 |Omega| is not reproduced: "
    "eta = 0.08271 gives 1 - eta = 0.9173, and measure_bound is (1 - eta)|Omega|.",
    "compat mode follows the worksheet formulas for D1, gamma0, tau and the second half of C1; "
    "strict mode follows the displayed equations.",
    "Printed worksheet values were evaluated partly in 10-digit floats; D-hat, the global "
    "distortion bound, Gamma1, C3-tilde and eta differ from them beyond the 9th digit. "
    "The enclosures here are rigorous.",
    "M2 = 2, the exact bound for |f''|, instead of the value 4 quoted in prose.",
    "D2 and D3 in the chain use the a-priori bound (f^i)'(c0) >= 3^i with Ntilde = N; "
    "the orbit section reports the directly summed values and the escape time Ntilde.",
)

_ORDER = (
    "lam", "N", "alpha0", "lambda0", "NR", "C1b_margin", "alpha1", "N1", "D1", "D2", "D3",
    "gamma0", "gamma1max", "gamma1", "gamma2", "gamma", "Dhat", "Dhathat", "Dist", "Gamma1",
    "k0", "tau1", "tau0", "one_minus_tau0_alpha0", "C3", "C3tilde", "alpha1_tau1",
    "gamma1min", "tau", "alpha", "etatilde", "eta",
)


def _ser(x):
    if isinstance(x, RInterval):
        return x.to_json()
    if isinstance(x, Verdict):
        return x.value
    return x


def _dataclass_dict(obj, skip=()) -> dict:
    return {f.name: _ser(getattr(obj, f.name)) for f in fields(obj) if f.name not in skip}


def serialize_start(start: StartingConstants) -> dict:
    return _dataclass_dict(start, skip=("alpha0_from_delta",))


def serialize_geometry(geom: GeometryBounds) -> dict:
    return _dataclass_dict(geom)


def serialize_chain(aux: AuxChain) -> dict:
    out = {k: v.to_json() for k, v in aux.values().items()}
    out["alpha1_tau1"] = aux.alpha1_tau1.to_json()
    return out


def serialize_report(report: ConditionReport) -> list:
    return [
        {"name": r.name, "holds": r.holds.value, "margin": r.margin.to_json(), "strict": r.strict}
        for r in report.records
    ]


def serialize_orbit(v: OrbitVerdicts) -> dict:
    out = _dataclass_dict(v)
    out["verdict"] = v.verdict.value
    return out


def check_document(res) -> dict:
    """Shared body of the check and certify outputs."""
    start, geom, aux = res.setup.start, res.setup.geom, res.chain
    extra = {
        "NR": nonresonance_tail(start.lambda0, 1).to_json(),
        "C1b_margin": res.report["C1b"].margin.to_json(),
        "one_minus_tau0_alpha0": res.report["C2"].margin.to_json(),
    }
    first = res.report.first_failure()
    return {
        "schema_version": SCHEMA_VERSION,
        "family": "quadratic",
        "mode": res.mode.value,
        "precision_bits": res.prec.bits,
        "inputs": res.inputs.to_dict(),
        "starting_constants": serialize_start(start),
        "geometry": serialize_geometry(geom),
        "chain": {**serialize_chain(aux), **extra},
        "conditions": serialize_report(res.report),
        "conditions_verdict": res.report.verdict.value,
        "first_failure": first.name if first else None,
    }


@dataclass
class Certification:
    document: dict
    verdict: str  # certified / failed / undecided


def certify(inputs: Inputs, mode="compat", prec: Precision | None = None, orbit_prec: Precision | None = None,
            retries: int = 3, dump=None) -> Certification:
    res = run_check_escalating(inputs, mode, prec or Precision(256), retries)
    doc = check_document(res)
    cond = res.report.verdict
    orbit_verdict = Verdict.UNDECIDED
    if cond is not Verdict.REFUTED:
        op = orbit_prec or default_precision(inputs.eps_exp, inputs.delta_exp)
        try:
            ov = verify_orbit_escalating(res.setup, op, retries, dump=dump)
            doc["orbit"] = serialize_orbit(ov)
            orbit_verdict = ov.verdict
        except (NotFound, NonResonanceFailure) as exc:
            doc["orbit"] = {"error": f"{type(exc).__name__}: {exc}"}
            orbit_verdict = Verdict.REFUTED
        except ParamExclError as exc:
            doc["orbit"] = {"error": f"{type(exc).__name__}: {exc}"}
    else:
        doc["orbit"] = {"skipped": "conditions refuted"}
    overall = cond & orbit_verdict
    verdict = {Verdict.PROVED: "certified", Verdict.REFUTED: "failed", Verdict.UNDECIDED: "undecided"}[overall]
    doc["verdict"] = verdict
    if verdict == "certified":
        doc["measure_bound"] = measure_bound(res.chain.eta, inputs.window.omega_len(res.prec)).to_json()
    doc["notes"] = list(NOTES)
    return Certification(doc, verdict)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# --------------------------------------------------------------------------- text
def _mid15(iv) -> str:
    if isinstance(iv, dict) and "lo" in iv:
        with decimal.localcontext() as ctx:
            ctx.prec = 60
            m = (decimal.Decimal(iv["lo"]) + decimal.Decimal(iv["hi"])) / 2
            ctx.prec = 15
            return str(+m)
    return str(iv)


def render_text(doc: dict) -> str:
    """Worksheet-style table: one quantity per line at 15 significant digits."""
    head = [f"{k} {doc[k]}" for k in ("family", "mode", "precision_bits") if k in doc]
    lines = ["  ".join(head)]
    inputs = doc.get("inputs", {})
    lines.append("inputs  " + "  ".join(f"{k}={v}" for k, v in inputs.items()))
    pool = {}
    pool.update(doc.get("starting_constants", {}))
    pool.update(doc.get("geometry", {}))
    pool.update(doc.get("chain", {}))
    if pool:
        lines.append("")
        for name in _ORDER:
            if name in pool:
                lines.append(f"  {name:<22}{_mid15(pool[name])}")
    conds = doc.get("conditions")
    if conds:
        lines.append("")
        for c in conds:
            lines.append(f"  {c['name']:<22}{c['holds']:<10} margin {_mid15(c['margin'])}")
    orbit = doc.get("orbit")
    if isinstance(orbit, dict) and orbit:
        lines.append("")
        for k, v in orbit.items():
            lines.append(f"  orbit.{k:<16}{_mid15(v) if v is not None else '-'}")
    for key in ("conditions_verdict", "first_failure", "verdict"):
        if doc.get(key) is not None:
            lines.append(f"{key} {doc[key]}")
    if "measure_bound" in doc:
        lines.append(f"measure_bound >= {doc['measure_bound']['lo']}")
    for note in doc.get("notes", ()):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
