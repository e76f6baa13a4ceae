"""Certify the default configuration end to end and save the certificate.

    python3 scripts/certify_headline.py --out runs/headline.json --trace runs/headline_trace.tsv

Prints the headline bound, the orbit escape index and wall time. Pass
--delta-exp/--eps-exp to run a smaller window (20/100 finishes in under a second).
"""

import argparse
import time
from pathlib import Path

from paramexcl.arith import Precision
from paramexcl.certificate import certify, dumps
from paramexcl.config import DEFAULT


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--mode", choices=["compat", "strict"], default="compat")
    ap.add_argument("--delta-exp", type=int, default=DEFAULT.delta_exp)
    ap.add_argument("--eps-exp", type=int, default=DEFAULT.eps_exp)
    ap.add_argument("--bits", type=int, default=256)
    ap.add_argument("--orbit-bits", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--trace", type=Path, default=None, help="write the orbit boxes as TSV")
    args = ap.parse_args()

    inputs = DEFAULT.with_(delta_exp=args.delta_exp, eps_exp=args.eps_exp)
    orbit_prec = Precision(args.orbit_bits) if args.orbit_bits else None
    t0 = time.perf_counter()
    if args.trace:
        args.trace.parent.mkdir(parents=True, exist_ok=True)
        with args.trace.open("w") as fh:
            cert = certify(inputs, args.mode, Precision(args.bits), orbit_prec, dump=fh)
    else:
        cert = certify(inputs, args.mode, Precision(args.bits), orbit_prec)
    elapsed = time.perf_counter() - t0

    doc = cert.document
    print(f"verdict      {cert.verdict}")
    print(f"eta          {doc['chain']['eta']['hi']}")
    if "measure_bound" in doc:
        print(f"measure      {doc['measure_bound']['lo']}")
    orbit = doc.get("orbit", {})
    if "ntilde" in orbit:
        print(f"Ntilde       {orbit['ntilde']}  (N = {doc['starting_constants']['N']}, {orbit['bits']} bits)")
    else:
        print(f"orbit        {orbit}")
    if doc["first_failure"]:
        print(f"first failure {doc['first_failure']}")
    print(f"wall time    {elapsed:.1f} s")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(dumps(doc))
    return 0 if cert.verdict == "certified" else 1


if __name__ == "__main__":
    raise SystemExit(main())
