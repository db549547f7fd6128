"""Command line front end.

Subcommands mirror the library surface: vector and matrix recovery from
files, isometry-constant computation, approximation-property and null
space checks, bound evaluation and declarative experiment runs.  Exit
code 0 means success, 1 means a verification found a violation (or the
problem was infeasible), 2 means a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .analysis import (
    BoundVariant,
    ConstraintForm,
    SearchBudget,
    Violated,
    bound_theorem23,
    bound_theorem35,
    bound_theorem36,
    nsp_check,
    rip_constant,
    tsap_check,
)
from .core import DantzigSelector, LpBall, NormTriple, TruncationSet
from .errors import Infeasible, InvalidInput, TruncqError, Unsupported
from .harness import (
    ExperimentKind,
    ExperimentSpec,
    load_matrix,
    load_vector,
    run_experiment,
    save_vector,
    spec_from_dict,
)
from .solvers_matrix import LinearMatrixMap, solve_truncated_schatten
from .solvers_vector import solve_truncated_l1, solve_truncated_lq

__all__ = ["main", "build_parser"]


def _float_or_inf(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncq",
        description="truncated q-norm recovery and its guarantee machinery",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", type=str, default=None,
                        help="JSON config file (experiment spec format)")
    parser.add_argument("--output", type=str, default=None)
    parser.add_argument("--threads", type=int, default=1)
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("recover", help="vector recovery from files")
    rec.add_argument("--matrix", required=True, help="CSV measurement matrix")
    rec.add_argument("--measurements", required=True,
                     help="file with one value per line")
    rec.add_argument("--truncate", type=int, nargs="+", default=None,
                     help="explicit truncation-set indices (default: all)")
    rec.add_argument("--q", type=float, default=1.0)
    rec.add_argument("--p", type=_float_or_inf, default=2.0)
    rec.add_argument("--eta", type=float, default=0.0)
    rec.add_argument("--dantzig", action="store_true")

    rem = sub.add_parser("recover-matrix", help="low-rank recovery from files")
    rem.add_argument("--sensing", required=True,
                     help="CSV of vectorized sensing matrices, one per row")
    rem.add_argument("--shape", type=int, nargs=2, required=True,
                     metavar=("M", "N"))
    rem.add_argument("--measurements", required=True)
    rem.add_argument("--t", type=int, required=True,
                     help="number of penalized (smallest) singular values")
    rem.add_argument("--q", type=float, default=1.0)
    rem.add_argument("--p", type=_float_or_inf, default=2.0)
    rem.add_argument("--eta", type=float, default=0.0)
    rem.add_argument("--dantzig", action="store_true")

    rip = sub.add_parser("rip", help="restricted isometry constant")
    rip.add_argument("--matrix", required=True)
    rip.add_argument("--k", type=int, required=True)
    rip.add_argument("--p", type=_float_or_inf, default=2.0)
    rip.add_argument("--sample-supports", type=int, default=None)

    tsap = sub.add_parser("tsap", help="sparse-approximation-property check")
    tsap.add_argument("--matrix", required=True)
    tsap.add_argument("--k", type=int, required=True)
    tsap.add_argument("--t", type=int, required=True)
    tsap.add_argument("--q", type=float, default=1.0)
    tsap.add_argument("--r", type=_float_or_inf, default=2.0)
    tsap.add_argument("--p", type=_float_or_inf, default=2.0)
    tsap.add_argument("--d", type=float, required=True)
    tsap.add_argument("--beta", type=float, required=True)
    tsap.add_argument("--dantzig", action="store_true")
    tsap.add_argument("--samples", type=int, default=10_000)

    nsp = sub.add_parser("nsp", help="truncated null space property check")
    nsp.add_argument("--matrix", required=True)
    nsp.add_argument("--k", type=int, required=True)
    nsp.add_argument("--t", type=int, required=True)
    nsp.add_argument("--beta", type=float, required=True)
    nsp.add_argument("--samples", type=int, default=10_000)

    bnd = sub.add_parser("bound", help="evaluate error-bound constants")
    bnd.add_argument("--which", default="rq",
                     choices=["rq", "qq_strict", "qq_equal", "from-delta",
                              "classic"])
    bnd.add_argument("--q", type=float, default=1.0)
    bnd.add_argument("--r", type=_float_or_inf, default=2.0)
    bnd.add_argument("--p", type=_float_or_inf, default=2.0)
    bnd.add_argument("--d", type=float, default=None)
    bnd.add_argument("--beta", type=float, default=None)
    bnd.add_argument("--delta", type=float, default=None)
    bnd.add_argument("--t-factor", type=float, default=2.0)
    bnd.add_argument("--k", type=int, required=True)
    bnd.add_argument("--t", type=int, default=None)
    bnd.add_argument("--tc-size", type=int, default=0)
    bnd.add_argument("--eps", type=float, default=0.0)
    bnd.add_argument("--eta", type=float, default=0.0)
    bnd.add_argument("--sigma", type=float, default=0.0)
    bnd.add_argument("--dantzig", action="store_true")

    sub.add_parser("experiment", help="run a declarative experiment "
                                      "(requires --config)")
    return parser


def _constraint(args):
    if args.dantzig:
        return DantzigSelector(args.eta)
    return LpBall(args.p, args.eta)


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _cmd_recover(args) -> int:
    a = load_matrix(args.matrix)
    b = load_vector(args.measurements)
    n = a.shape[1]
    if args.truncate is None:
        t_set = TruncationSet.full(n)
    else:
        t_set = TruncationSet(tuple(args.truncate), n)
    constraint = _constraint(args)
    if args.q == 1.0:
        rep = solve_truncated_l1(a, b, t_set, constraint)
    else:
        rep = solve_truncated_lq(a, b, t_set, args.q, constraint)
    if args.output:
        save_vector(args.output, rep.solution)
    _emit({
        "converged": rep.converged,
        "iterations": rep.iterations_used,
        "objective": rep.objective_value,
        "constraint_residual": rep.constraint_residual,
        "solution": [float(v) for v in rep.solution] if not args.output else
                    f"written to {args.output}",
    }, None)
    return 0 if rep.converged else 1


def _cmd_recover_matrix(args) -> int:
    rows = load_matrix(args.sensing)
    mm, nn = args.shape
    if rows.shape[1] != mm * nn:
        raise InvalidInput(
            f"sensing rows have {rows.shape[1]} entries, expected {mm * nn}"
        )
    lin_map = LinearMatrixMap(rows.reshape(rows.shape[0], mm, nn))
    b = load_vector(args.measurements)
    rep = solve_truncated_schatten(lin_map, b, args.t, args.q,
                                   _constraint(args))
    if args.output:
        np.savetxt(args.output, rep.solution, delimiter=",", fmt="%.17g")
    _emit({
        "converged": rep.converged,
        "iterations": rep.iterations_used,
        "objective": rep.objective_value,
        "constraint_residual": rep.constraint_residual,
    }, None)
    return 0 if rep.converged else 1


def _cmd_rip(args) -> int:
    a = load_matrix(args.matrix)
    est = rip_constant(a, args.k, args.p,
                       sample_supports=args.sample_supports, seed=args.seed)
    _emit({
        "k": est.k,
        "p": est.p,
        "delta": est.delta,
        "exact": est.exact,
        "extremal_support": (list(est.extremal_support.indices)
                             if est.extremal_support else None),
        "warning": est.warning,
    }, args.output)
    return 0


def _verdict_payload(rep) -> tuple[dict, int]:
    if isinstance(rep.verdict, Violated):
        return {
            "verdict": "violated",
            "lhs": rep.verdict.lhs,
            "rhs": rep.verdict.rhs,
            "witness_t": list(rep.verdict.witness_t.indices),
            "witness_x": [float(v) for v in rep.verdict.witness_x],
        }, 1
    return {"verdict": type(rep.verdict).__name__.lower()}, 0


def _cmd_tsap(args) -> int:
    a = load_matrix(args.matrix)
    mode = ConstraintForm.DANTZIG if args.dantzig else ConstraintForm.LP
    rep = tsap_check(a, args.k, args.t, NormTriple(args.q, args.r, args.p),
                     args.d, args.beta, mode,
                     SearchBudget(samples=args.samples, seed=args.seed))
    payload, code = _verdict_payload(rep)
    payload.update(k=args.k, t=args.t, d=args.d, beta=args.beta)
    _emit(payload, args.output)
    return code


def _cmd_nsp(args) -> int:
    a = load_matrix(args.matrix)
    rep = nsp_check(a, args.k, args.t, args.beta,
                    SearchBudget(samples=args.samples, seed=args.seed))
    payload, code = _verdict_payload(rep)
    payload.update(k=args.k, t=args.t, beta=args.beta)
    _emit(payload, args.output)
    return code


def _cmd_bound(args) -> int:
    mode = ConstraintForm.DANTZIG if args.dantzig else ConstraintForm.LP
    t = args.t if args.t is not None else args.k
    if args.which == "from-delta":
        if args.delta is None:
            raise InvalidInput("--which from-delta needs --delta")
        report = bound_theorem35(args.delta, args.t_factor, args.k,
                                 args.tc_size, t, args.eps, args.eta,
                                 args.sigma, mode)
    elif args.which == "classic":
        if args.delta is None:
            raise InvalidInput("--which classic needs --delta")
        report = bound_theorem36(args.delta, args.t_factor, args.k,
                                 args.eps, args.eta, args.sigma, mode)
    else:
        if args.d is None or args.beta is None:
            raise InvalidInput("direct bound evaluation needs --d and --beta")
        report = bound_theorem23(NormTriple(args.q, args.r, args.p), args.d,
                                 args.beta, args.k, t, args.tc_size,
                                 args.eps, args.eta, args.sigma,
                                 BoundVariant(args.which))
    _emit({
        "theorem": report.theorem,
        "noise_coefficient": report.noise_coefficient,
        "compressibility_coefficient": report.compressibility_coefficient,
        "bound_value": report.bound_value,
        "inputs": {k: str(v) for k, v in report.inputs.items()},
    }, args.output)
    return 0


def _cmd_experiment(args) -> int:
    if not args.config:
        raise InvalidInput("experiment needs --config")
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed config {args.config}: {exc}") from exc
    spec = spec_from_dict(data)
    overrides = {}
    if args.seed:
        overrides["seed"] = args.seed
    if args.output:
        overrides["output"] = args.output
    if args.threads != 1:
        overrides["threads"] = args.threads
    if overrides:
        from dataclasses import replace

        spec = replace(spec, **overrides)
    report = run_experiment(spec)
    _emit({"kind": report.kind, "aggregates": report.aggregates}, None)
    bad = (report.aggregates.get("violations", 0)
           + report.aggregates.get("failures", 0))
    if spec.kind in (ExperimentKind.TSAP, ExperimentKind.BOUND):
        return 1 if bad else 0
    return 0


_COMMANDS = {
    "recover": _cmd_recover,
    "recover-matrix": _cmd_recover_matrix,
    "rip": _cmd_rip,
    "tsap": _cmd_tsap,
    "nsp": _cmd_nsp,
    "bound": _cmd_bound,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except (InvalidInput, Unsupported) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TruncqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
