"""Regenerate tests/golden/*.json from the independent mpmath oracle.

    python3 scripts/make_goldens.py

The published worksheet values live in tests/golden/worksheet.json and are
typed in by hand; this script never touches that file.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))
import oracle  # noqa: E402

DIGITS = 40


def s(x):
    return mpmath.nstr(x, DIGITS, min_fixed=1, max_fixed=0) if not isinstance(x, int) else x


def chain_golden(mode, **kw):
    with mpmath.workdps(80):
        values = oracle.chain(mode=mode, dps=80, **kw)
    return {k: s(v) for k, v in values.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(ROOT / "tests" / "golden"))
    ap.add_argument("--skip-headline-orbit", action="store_true", help="skip the 10^4-digit escape run")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    headline = {"compat": chain_golden("compat"), "strict": chain_golden("strict")}
    (out / "oracle_headline.json").write_text(json.dumps(headline, indent=1) + "\n")
    (out / "strict_headline.json").write_text(json.dumps(headline["strict"], indent=1) + "\n")

    small = {}
    with mpmath.workdps(60):
        sc = oracle.starting_constants(3, Fraction(1, 2), 2)
        small["expansivity_d3_i05_e2"] = {"C1": s(sc["C1"]), "lam": s(sc["lam"]), "N": sc["N"]}
        sc = oracle.starting_constants(500, Fraction(4, 5), 2495)
        small["setup_d500_e2495"] = {k: s(v) for k, v in sc.items()}
        small["setup_d500_e2495"]["N1_compat"] = oracle.n1(500, Fraction(4, 5), sc["N"], "compat")
        small["setup_d500_e2495"]["N1_strict"] = oracle.n1(500, Fraction(4, 5), sc["N"], "strict")
        d2, d3 = oracle.d2_d3(mpmath.mpf("0.61"), 10)
        small["d2d3_l061_n10"] = {"D2": s(d2), "D3": s(d3)}
        small["N_eps100"] = oracle.starting_constants(20, Fraction(4, 5), 100)["N"]
        small["N1_delta50"] = {
            "compat": oracle.n1(50, Fraction(4, 5), 10**6, "compat"),
            "strict": oracle.n1(50, Fraction(4, 5), 10**6, "strict"),
        }
        small["ntilde_eps100"] = oracle.escape_index(100)
        c3 = chain_golden("compat", s_gamma1=Fraction(4, 5))
        small["headline_sgamma1_080"] = {"gamma1": c3["gamma1"], "gamma1min": c3["gamma1min"],
                                      "C3_margin": c3["C3_margin"]}
        grid = {}
        for a1 in (Fraction(3, 20), Fraction(1, 5), Fraction(1, 4)):
            for g1 in (Fraction(4, 5), Fraction(17, 20), Fraction(9, 10)):
                for g2 in (Fraction(3, 4), Fraction(4, 5), Fraction(17, 20)):
                    v = oracle.chain(s_alpha1=a1, s_gamma1=g1, s_gamma2=g2)
                    grid[f"{a1},{g1},{g2}"] = {"eta": s(v["eta"]), "ok": oracle.all_conditions(v)}
        small["grid27_eta"] = grid
    if not args.skip_headline_orbit:
        small["ntilde_headline"] = oracle.escape_index(4990)
    (out / "oracle_small.json").write_text(json.dumps(small, indent=1) + "\n")
    print(f"wrote goldens to {out}")


if __name__ == "__main__":
    main()
