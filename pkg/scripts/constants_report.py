#!/usr/bin/env python3
"""Print the recovery-guarantee constants implied by a measurement matrix.

Reads a CSV matrix, computes the order-2(k+|T^c|) isometry constant, then
the derived truncated approximation constants and both lower-isometry
constants, and finally runs the violation search to double check them.
"""

import argparse
import math
import sys

from truncq.analysis import (
    ConstraintForm,
    SearchBudget,
    Violated,
    rip_constant,
    rip_lower_from_tsap,
    RipOrder,
    tsap_check,
    tsap_constants_from_rip,
)
from truncq.core import NormTriple
from truncq.harness import load_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("matrix", help="CSV file with the measurement matrix")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--t", type=int, default=None,
                    help="truncation size (default n)")
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    a = load_matrix(args.matrix)
    n = a.shape[1]
    t = args.t if args.t is not None else n
    tc_size = n - t
    order = min(n, 2 * (args.k + tc_size))
    est = rip_constant(a, order)
    kind = "exact" if est.exact else "sampled lower bound"
    print(f"matrix {a.shape[0]}x{n}, k={args.k}, t={t}, |T^c|={tc_size}")
    print(f"delta_{order} = {est.delta:.6f} ({kind})")
    if est.warning:
        print(f"warning: {est.warning}")
    if est.delta >= math.sqrt(0.5):
        print("constant exceeds the derivation gate sqrt(1/2); "
              "no guarantees follow")
        return 1

    d1, d2, beta = tsap_constants_from_rip(est.delta, 2.0, args.k, tc_size)
    print(f"beta = {beta:.6f}   D1 = {d1:.6f} (lp ball)   "
          f"D2 = {d2:.6f} (selector)")
    norms = NormTriple(1.0, 2.0, 2.0)
    c1 = rip_lower_from_tsap(d1, beta, args.k, t, tc_size, norms,
                             RipOrder.ONE_K)
    c2 = rip_lower_from_tsap(d1, beta, args.k, t, tc_size, norms,
                             RipOrder.TWO_K)
    print(f"lower-isometry constants: C1 = {c1:.6f}  C2 = {c2:.6f}")

    budget = SearchBudget(samples=args.samples, seed=args.seed)
    for mode, d in ((ConstraintForm.LP, d1), (ConstraintForm.DANTZIG, d2)):
        rep = tsap_check(a, args.k, t, norms, d, beta, mode, budget,
                         certificate="isometry-derived constants")
        if isinstance(rep.verdict, Violated):
            print(f"{mode.value}: VIOLATED (lhs {rep.verdict.lhs:.6e} > "
                  f"rhs {rep.verdict.rhs:.6e}) -- investigate")
            return 1
        print(f"{mode.value}: no violation found")
    return 0


if __name__ == "__main__":
    sys.exit(main())
