"""Solvers for truncated q-norm programs on vectors.

The convex case (q = 1) is handled by ADMM with three blocks: a cached
linear solve for the x-update, soft-thresholding for the truncated
objective and an lp-ball projection for the noise constraint.  The
Dantzig-selector constraint is reduced to the same template by working
with the normal-equations operator A^T A and an inf-ball.  The nonconvex
case (0 < q < 1) runs iteratively reweighted l1 on top of the convex
solver; all its guarantees are local.  The ISD outer loop alternates
truncated solves with support re-detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .core import (
    DantzigSelector,
    LpBall,
    NoiseConstraint,
    TruncationSet,
    as_matrix,
    as_vector,
    qnorm,
    restrict,
)
from .errors import Infeasible, InvalidInput, Unsupported
from .numerics import least_squares, project_lp_ball, soft_threshold

__all__ = [
    "SolverConfig",
    "SolverReport",
    "FirstJump",
    "TopJ",
    "ThresholdRule",
    "solve_truncated_l1",
    "solve_truncated_l1_ds",
    "solve_truncated_lq",
    "isd_recover",
    "constraint_residual",
]


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 20000
    tolerance: float = 1e-8
    admm_rho: float = 1.0
    irl1_outer_iters: int = 6
    irl1_epsilon_start: float = 1.0
    isd_max_rounds: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidInput("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise InvalidInput("tolerance must be positive")
        if self.admm_rho <= 0:
            raise InvalidInput("admm_rho must be positive")


@dataclass(frozen=True)
class SolverReport:
    solution: np.ndarray
    converged: bool
    iterations_used: int
    objective_value: float  # ||xhat_T||_q^q
    constraint_residual: float
    support_history: tuple[TruncationSet, ...] = ()


@dataclass(frozen=True)
class FirstJump:
    """Detect support up to the first magnitude jump exceeding `factor`."""

    factor: float = 3.0


@dataclass(frozen=True)
class TopJ:
    """Detect the top counts[round] magnitudes at each ISD round."""

    counts: tuple[int, ...]


ThresholdRule = FirstJump | TopJ


def constraint_residual(a: np.ndarray, b: np.ndarray, x: np.ndarray,
                        constraint: NoiseConstraint) -> float:
    """Amount by which x violates the noise constraint (0 when feasible)."""
    res = a @ x - b
    if isinstance(constraint, LpBall):
        return max(0.0, qnorm(res, constraint.p) - constraint.eta)
    return max(0.0, qnorm(a.T @ res, math.inf) - constraint.eta)


def _admm_weighted_l1(op: np.ndarray, rhs: np.ndarray, weights: np.ndarray,
                      p: float, eta: float, config: SolverConfig,
                      x0: np.ndarray | None = None):
    """ADMM for min ||w .* x||_1 s.t. ||op x - rhs||_p <= eta.

    eta = 0 enforces op x = rhs.  Returns (x, converged, iterations).
    """
    m, n = op.shape
    rho = config.admm_rho
    system = np.eye(n) + op.T @ op
    factor = cho_factor(system)
    x = np.zeros(n) if x0 is None else x0.copy()
    s = x.copy()
    u = np.zeros(m)
    alpha = np.zeros(n)
    gamma = np.zeros(m)
    scale = 1.0 + float(np.linalg.norm(rhs))
    op_t = op.T
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        x = cho_solve(factor, (s - alpha) + op_t @ (rhs + u - gamma))
        ox = op @ x
        s_old = s
        u_old = u
        s = soft_threshold(x + alpha, weights / rho)
        if eta == 0.0:
            u = np.zeros(m)
        else:
            u = project_lp_ball(ox - rhs + gamma, p, eta)
        alpha = alpha + (x - s)
        gamma = gamma + (ox - rhs - u)
        prim = max(np.linalg.norm(x - s), np.linalg.norm(ox - rhs - u))
        dual = rho * max(
            np.linalg.norm(s - s_old), np.linalg.norm(op_t @ (u - u_old))
        )
        if max(prim, dual) <= config.tolerance * scale:
            converged = True
            break
        if it % 50 == 0:
            if prim > 10.0 * dual:
                rho *= 2.0
                alpha /= 2.0
                gamma /= 2.0
            elif dual > 10.0 * prim:
                rho /= 2.0
                alpha *= 2.0
                gamma *= 2.0
    return x, converged, it


def _check_equality_feasible(a: np.ndarray, b: np.ndarray,
                             config: SolverConfig) -> None:
    x_ls = least_squares(a, b)
    res = np.linalg.norm(a @ x_ls - b)
    if res > 1e-8 * (1.0 + np.linalg.norm(b)):
        raise Infeasible(
            f"equality-constrained problem is infeasible (ls residual {res:.3e})"
        )


def _weights_for(t: TruncationSet, n: int, values: np.ndarray | None = None):
    w = np.zeros(n)
    idx = t.as_array()
    w[idx] = 1.0 if values is None else values
    return w


def _report(a, b, x, t, q, constraint, converged, iters,
            history=()) -> SolverReport:
    obj = float(np.sum(np.abs(x[t.as_array()]) ** q))
    res = constraint_residual(a, b, x, constraint)
    ok = converged and res <= config_residual_gate(b, constraint)
    return SolverReport(
        solution=x,
        converged=ok,
        iterations_used=iters,
        objective_value=obj,
        constraint_residual=res,
        support_history=tuple(history),
    )


def config_residual_gate(b: np.ndarray, constraint: NoiseConstraint,
                         tolerance: float = 1e-6) -> float:
    """Feasibility slack accepted when declaring convergence."""
    return tolerance * (1.0 + float(np.linalg.norm(b)))


def solve_truncated_l1(a, b, t: TruncationSet, constraint: NoiseConstraint,
                       config: SolverConfig = SolverConfig(),
                       x0: np.ndarray | None = None) -> SolverReport:
    """min ||x_T||_1 subject to b - A x in the noise set."""
    arr = as_matrix(a)
    rhs = as_vector(b)
    if rhs.size != arr.shape[0]:
        raise InvalidInput("b length does not match row count of A")
    if t.ambient != arr.shape[1]:
        raise InvalidInput("truncation set ambient does not match column count")
    if isinstance(constraint, DantzigSelector):
        return solve_truncated_l1_ds(arr, rhs, t, constraint.eta, config, x0=x0)
    if not (constraint.p in (1.0, 2.0) or math.isinf(constraint.p)):
        raise Unsupported("lp-ball constraint needs p in {1, 2, inf}")
    if constraint.eta == 0.0:
        _check_equality_feasible(arr, rhs, config)
    w = _weights_for(t, arr.shape[1])
    x, conv, iters = _admm_weighted_l1(
        arr, rhs, w, constraint.p, constraint.eta, config, x0=x0
    )
    return _report(arr, rhs, x, t, 1.0, constraint, conv, iters)


def solve_truncated_l1_ds(a, b, t: TruncationSet, eta: float,
                          config: SolverConfig = SolverConfig(),
                          x0: np.ndarray | None = None) -> SolverReport:
    """min ||x_T||_1 subject to ||A^T (A x - b)||_inf <= eta.

    Solved with the same ADMM template applied to the normal-equations
    operator A^T A and an inf-ball constraint.
    """
    arr = as_matrix(a)
    rhs = as_vector(b)
    if eta < 0:
        raise InvalidInput("eta must be nonnegative")
    gram = arr.T @ arr
    g = arr.T @ rhs
    w = _weights_for(t, arr.shape[1])
    x, conv, iters = _admm_weighted_l1(gram, g, w, math.inf, eta, config, x0=x0)
    return _report(arr, rhs, x, t, 1.0, DantzigSelector(eta), conv, iters)


def solve_truncated_lq(a, b, t: TruncationSet, q: float,
                       constraint: NoiseConstraint,
                       config: SolverConfig = SolverConfig()) -> SolverReport:
    """min ||x_T||_q^q (0 < q < 1) via iteratively reweighted l1.

    Outer rounds set weights (|x_i| + eps_j)^(q-1) on T and shrink eps;
    the best feasible iterate by true objective is returned, so the
    objective never increases across rounds.  Solutions are local optima.
    """
    arr = as_matrix(a)
    rhs = as_vector(b)
    if not (0.0 < q < 1.0):
        raise InvalidInput(f"q must lie in (0, 1), got {q}")
    n = arr.shape[1]
    bn = float(np.linalg.norm(rhs))
    if bn == 0.0:
        zero = np.zeros(n)
        return _report(arr, rhs, zero, t, q, constraint, True, 0)
    b_s = rhs / bn
    if isinstance(constraint, LpBall):
        eta_s = constraint.eta / bn
        p = constraint.p
        if not (p in (1.0, 2.0) or math.isinf(p)):
            raise Unsupported("lp-ball constraint needs p in {1, 2, inf}")
        if constraint.eta == 0.0:
            _check_equality_feasible(arr, rhs, config)
        op, op_rhs = arr, b_s
    else:
        eta_s = constraint.eta / bn
        p = math.inf
        op, op_rhs = arr.T @ arr, arr.T @ b_s

    def objective(x):
        xt = restrict(x, t)
        return float(np.sum(np.abs(xt[t.as_array()]) ** q))

    gate = config_residual_gate(rhs, constraint)

    x = least_squares(arr, b_s)
    best_x = None
    best_obj = math.inf
    total_iters = 0
    any_converged = False
    if constraint_residual(arr, b_s, x, _scaled(constraint, bn)) <= gate / bn:
        best_x, best_obj = x.copy(), objective(x)
    eps = config.irl1_epsilon_start
    idx = t.as_array()
    for _ in range(config.irl1_outer_iters):
        wv = (np.abs(x[idx]) + eps) ** (q - 1.0)
        w = _weights_for(t, n, wv)
        x, conv, iters = _admm_weighted_l1(op, op_rhs, w, p, eta_s, config, x0=x)
        total_iters += iters
        any_converged = any_converged or conv
        res = constraint_residual(arr, b_s, x, _scaled(constraint, bn))
        if res <= gate / bn and objective(x) < best_obj:
            best_x, best_obj = x.copy(), objective(x)
        eps = max(eps / 10.0, 1e-10)
    if best_x is None:
        best_x = x
    sol = best_x * bn
    return _report(arr, rhs, sol, t, q, constraint, any_converged, total_iters)


def _scaled(constraint: NoiseConstraint, bn: float) -> NoiseConstraint:
    if isinstance(constraint, LpBall):
        return LpBall(constraint.p, constraint.eta / bn)
    return DantzigSelector(constraint.eta / bn)


def _detect_support(x: np.ndarray, rule: ThresholdRule, round_idx: int):
    """Indices believed to carry signal energy, per the threshold rule."""
    mags = np.abs(x)
    order = np.argsort(-mags, kind="stable")
    sorted_mags = mags[order]
    n = x.size
    if isinstance(rule, TopJ):
        j = rule.counts[min(round_idx, len(rule.counts) - 1)]
        j = max(0, min(j, n - 1))
        return tuple(int(i) for i in order[:j])
    floor = 1e-12 * (1.0 + sorted_mags[0])
    for i in range(n - 1):
        hi, lo = sorted_mags[i], sorted_mags[i + 1]
        if hi <= floor:
            break
        if hi > rule.factor * lo:
            return tuple(int(j) for j in order[: i + 1])
    return ()


def isd_recover(a, b, q: float, constraint: NoiseConstraint,
                config: SolverConfig = SolverConfig(),
                threshold_rule: ThresholdRule = FirstJump()) -> SolverReport:
    """Iterative support detection: alternate truncated solves and detection.

    Round 0 solves with T = {0, ..., n-1}; each later round solves with
    T = (detected support)^c and stops when the detected support repeats
    or the round cap is reached.
    """
    arr = as_matrix(a)
    rhs = as_vector(b)
    n = arr.shape[1]
    t = TruncationSet.full(n)
    history: list[TruncationSet] = []
    # round 0 uses T = full, i.e. detected support I = ()
    prev_support: tuple[int, ...] = ()
    report = None
    x_prev = None
    for round_idx in range(config.isd_max_rounds):
        if q == 1.0:
            report = solve_truncated_l1(arr, rhs, t, constraint, config, x0=x_prev)
        else:
            report = solve_truncated_lq(arr, rhs, t, q, constraint, config)
        history.append(t)
        x_prev = report.solution
        support = _detect_support(report.solution, threshold_rule, round_idx)
        if support == prev_support or len(support) >= n:
            break
        prev_support = support
        if support:
            t = TruncationSet(support, n).complement()
        else:
            t = TruncationSet.full(n)
    return replace(report, support_history=tuple(history))
