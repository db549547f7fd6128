#!/usr/bin/env python3
"""Compare observed recovery error against the isometry-derived l2 bound.

For each trial: draw a tall Gaussian matrix, compute its exact isometry
constant by enumeration, derive the truncated approximation constants,
solve the truncated l1 problem and print observed error next to the bound.
Instances whose constant misses the derivation gate are skipped.
"""

import argparse
import math
import sys

import numpy as np

from truncq.analysis import bound_theorem35, rip_constant
from truncq.core import LpBall, TruncationSet, sigma_k
from truncq.harness import Flat, Power, add_noise, gaussian_matrix, sparse_signal
from truncq.solvers_vector import solve_truncated_l1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=256)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--eps", type=float, default=0.05,
                    help="noise level, also used as the solver ball radius")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--power", type=float, default=None,
                    help="power-decay exponent (default: flat signals)")
    args = ap.parse_args()

    decay = Power(args.power) if args.power is not None else Flat()
    done = skipped = violations = 0
    seed = args.seed
    while done < args.trials:
        a = gaussian_matrix(args.m, args.n, seed)
        x0 = sparse_signal(args.n, args.k, decay, seed=seed)
        comp = tuple(i for i in range(args.n) if x0[i] == 0.0)
        t_set = TruncationSet(comp, args.n)
        tc_size = args.n - len(t_set)
        order = min(args.n, 2 * (args.k + tc_size))
        delta = rip_constant(a, order).delta
        seed += 1
        if delta >= math.sqrt(0.5):
            skipped += 1
            continue
        b = add_noise(a @ x0, LpBall(2.0, args.eps), args.eps, a,
                      seed=seed + 10_000)
        rep = solve_truncated_l1(a, b, t_set, LpBall(2.0, args.eps))
        err = float(np.linalg.norm(rep.solution - x0))
        sig = sigma_k(x0, t_set, args.k, 1.0)
        bound = bound_theorem35(delta, 2.0, args.k, tc_size, len(t_set),
                                args.eps, args.eps, sig).bound_value
        flag = ""
        if err > bound + 1e-6:
            violations += 1
            flag = "  <-- VIOLATION"
        print(f"trial {done:3d}  delta={delta:.3f}  error={err:.3e}  "
              f"bound={bound:.3e}{flag}", flush=True)
        done += 1

    print(f"{args.trials} trials, {skipped} skipped (constant out of range), "
          f"{violations} violations")
    return 1 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
