"""Truncated Schatten-q minimization under a linear measurement map.

The measurement map is stored as an explicit stack of dense sensing
matrices; applying it takes Frobenius inner products.  The solver is a
two-loop scheme: the inner loop is the same ADMM template as the vector
case with truncated singular-value shrinkage as the prox step (the top
l - t singular values of the iterate are protected from shrinkage), and
the outer loop re-detects the protected subspace and, for q < 1, updates
IRLS weights on the tail singular values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .core import DantzigSelector, LpBall, NoiseConstraint, as_matrix, as_vector
from .errors import Infeasible, InvalidInput, Unsupported
from .numerics import project_lp_ball, svd
from .solvers_vector import SolverConfig

__all__ = [
    "LinearMatrixMap",
    "MatrixSolverReport",
    "apply_map",
    "apply_adjoint",
    "truncated_sv_shrink",
    "schatten_qnorm",
    "truncated_schatten_objective",
    "matrix_constraint_residual",
    "solve_truncated_schatten",
]


@dataclass(frozen=True)
class LinearMatrixMap:
    """Stack of sensing matrices; maps X to Frobenius inner products."""

    sensing: np.ndarray  # shape (n_meas, m, n)

    def __post_init__(self):
        arr = np.asarray(self.sensing, dtype=float)
        if arr.ndim != 3 or arr.shape[0] == 0:
            raise InvalidInput("sensing stack must have shape (l, m, n), l >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("sensing matrices contain non-finite entries")
        object.__setattr__(self, "sensing", arr)

    @property
    def n_measurements(self) -> int:
        return self.sensing.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.sensing.shape[1], self.sensing.shape[2]

    def as_operator(self) -> np.ndarray:
        """(l, m*n) matrix acting on row-major vectorized inputs."""
        l = self.sensing.shape[0]
        return self.sensing.reshape(l, -1)

    @classmethod
    def identity_vectorization(cls, m: int, n: int) -> "LinearMatrixMap":
        eye = np.eye(m * n).reshape(m * n, m, n)
        return cls(eye)


def apply_map(lin_map: LinearMatrixMap, x) -> np.ndarray:
    """Vector of Frobenius inner products <A_i, X>."""
    mat = as_matrix(x)
    if mat.shape != lin_map.shape:
        raise InvalidInput(
            f"matrix shape {mat.shape} does not match map shape {lin_map.shape}"
        )
    return np.tensordot(lin_map.sensing, mat, axes=([1, 2], [0, 1]))


def apply_adjoint(lin_map: LinearMatrixMap, y) -> np.ndarray:
    """Adjoint sum_i y_i A_i; satisfies <A(X), y> = <X, A*(y)>_F."""
    vec = as_vector(np.atleast_1d(np.asarray(y, dtype=float)))
    if vec.size != lin_map.n_measurements:
        raise InvalidInput("y length does not match number of measurements")
    return np.tensordot(vec, lin_map.sensing, axes=(0, 0))


def schatten_qnorm(x, q: float) -> float:
    """Schatten q-norm: lq norm of the singular values."""
    s = svd(as_matrix(x)).singular_values
    if math.isinf(q):
        return float(s[0])
    return float(np.sum(s**q) ** (1.0 / q))


def truncated_schatten_objective(x, t: int, q: float) -> float:
    """sum of the q-th powers of the t smallest singular values."""
    s = svd(as_matrix(x)).singular_values
    tail = s[len(s) - t:]
    return float(np.sum(tail**q))


def truncated_sv_shrink(x, threshold: float, protect: int) -> np.ndarray:
    """Soft-threshold singular values, leaving the top `protect` untouched."""
    mat = as_matrix(x)
    if threshold < 0:
        raise InvalidInput("threshold must be nonnegative")
    l = min(mat.shape)
    if not (0 <= protect <= l):
        raise InvalidInput(f"protect must be in [0, {l}], got {protect}")
    if threshold == 0.0 or protect == l:
        return mat.copy()
    fac = svd(mat)
    s = fac.singular_values.copy()
    s[protect:] = np.maximum(s[protect:] - threshold, 0.0)
    return (fac.u * s) @ fac.v.T


def _shrink_weighted(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-singular-value soft threshold (weights aligned descending)."""
    fac = svd(x)
    s = np.maximum(fac.singular_values - weights, 0.0)
    return (fac.u * s) @ fac.v.T


def matrix_constraint_residual(lin_map: LinearMatrixMap, b: np.ndarray,
                               x: np.ndarray,
                               constraint: NoiseConstraint) -> float:
    """Violation of the matrix noise constraint (0 when feasible)."""
    res = apply_map(lin_map, x) - b
    if isinstance(constraint, LpBall):
        from .core import qnorm

        return max(0.0, qnorm(res, constraint.p) - constraint.eta)
    return max(0.0, schatten_qnorm(apply_adjoint(lin_map, res), math.inf)
               - constraint.eta)


@dataclass(frozen=True)
class MatrixSolverReport:
    solution: np.ndarray
    converged: bool
    iterations_used: int
    objective_value: float  # ||Xhat_T||_{S_q}^q over the t smallest s.v.
    constraint_residual: float


def solve_truncated_schatten(lin_map: LinearMatrixMap, b, t: int, q: float,
                             constraint: NoiseConstraint,
                             config: SolverConfig = SolverConfig(),
                             outer_rounds: int = 10) -> MatrixSolverReport:
    """min sum_{j > l-t} lambda_j(X)^q s.t. b - A(X) in the noise set.

    T is pinned to the t smallest singular values of the iterate; the top
    l - t are protected from shrinkage and re-detected every inner SVD.
    q = 1 with t = l is plain nuclear-norm minimization.  For q < 1 the
    tail weights follow an IRLS-on-singular-values schedule and only a
    local solution is claimed.
    """
    rhs = as_vector(np.atleast_1d(np.asarray(b, dtype=float)))
    m, n = lin_map.shape
    l = min(m, n)
    if not (1 <= t <= l):
        raise InvalidInput(f"t must be in [1, {l}], got {t}")
    if not (0.0 < q <= 1.0):
        raise InvalidInput(f"q must be in (0, 1], got {q}")
    if rhs.size != lin_map.n_measurements:
        raise InvalidInput("b length does not match number of measurements")
    protect = l - t

    if isinstance(constraint, LpBall):
        if not (constraint.p in (1.0, 2.0) or math.isinf(constraint.p)):
            raise Unsupported("lp-ball constraint needs p in {1, 2, inf}")
        op = lin_map.as_operator()
        op_rhs = rhs
        ds_mode = False
    else:
        # Dantzig selector: work with X -> A*(A(X)) and a Schatten-inf ball
        g = lin_map.as_operator()
        op = g.T @ g  # (mn, mn), measurements live in matrix space
        op_rhs = (g.T @ rhs)
        ds_mode = True
    eta = constraint.eta

    if eta == 0.0 and not ds_mode:
        # infeasibility: b must lie in the range of the operator
        xr, *_ = np.linalg.lstsq(op, op_rhs, rcond=None)
        if np.linalg.norm(op @ xr - op_rhs) > 1e-8 * (1.0 + np.linalg.norm(op_rhs)):
            raise Infeasible("b is not in the range of the measurement map")

    mn = m * n
    n_out = op.shape[0]
    rho = config.admm_rho
    factor = cho_factor(np.eye(mn) + op.T @ op)
    x = np.zeros(mn)
    y = np.zeros(mn)
    lam = np.zeros(mn)
    gam = np.zeros(n_out)
    u = np.zeros(n_out)
    scale = 1.0 + float(np.linalg.norm(rhs))
    total_iters = 0
    best = None
    best_obj = math.inf
    eps = config.irl1_epsilon_start
    inner_cap = max(1, config.max_iterations // max(1, outer_rounds))
    gate = 1e-6 * scale
    any_converged = False

    def proj_noise(vec):
        if eta == 0.0:
            return np.zeros_like(vec)
        if ds_mode:
            # Schatten-inf ball: clip singular values at eta
            fac = svd(vec.reshape(m, n))
            s = np.minimum(fac.singular_values, eta)
            return ((fac.u * s) @ fac.v.T).ravel()
        return project_lp_ball(vec, constraint.p, eta)

    for _ in range(outer_rounds):
        if q < 1.0:
            s_now = svd(x.reshape(m, n)).singular_values
            tail_w = q * (s_now[protect:] + eps) ** (q - 1.0)
            weights = np.concatenate([np.zeros(protect), tail_w])
        converged = False
        for _ in range(inner_cap):
            total_iters += 1
            x = cho_solve(factor, (y - lam) + op.T @ (op_rhs + u - gam))
            ox = op @ x
            y_old = y
            u_old = u
            if q == 1.0:
                y = truncated_sv_shrink(
                    (x + lam).reshape(m, n), 1.0 / rho, protect
                ).ravel()
            else:
                y = _shrink_weighted(
                    (x + lam).reshape(m, n), weights / rho
                ).ravel()
            u = proj_noise(ox - op_rhs + gam)
            lam = lam + (x - y)
            gam = gam + (ox - op_rhs - u)
            prim = max(np.linalg.norm(x - y), np.linalg.norm(ox - op_rhs - u))
            dual = rho * max(
                np.linalg.norm(y - y_old), np.linalg.norm(op.T @ (u - u_old))
            )
            if max(prim, dual) <= config.tolerance * scale:
                converged = True
                break
        any_converged = any_converged or converged
        cand = x.reshape(m, n)
        res = matrix_constraint_residual(lin_map, rhs, cand, constraint)
        obj = truncated_schatten_objective(cand, t, q)
        if res <= gate and obj < best_obj:
            best, best_obj = cand.copy(), obj
        if q == 1.0 and converged:
            break
        eps = max(eps / 10.0, 1e-10)

    if best is None:
        best = x.reshape(m, n)
        best_obj = truncated_schatten_objective(best, t, q)
    res = matrix_constraint_residual(lin_map, rhs, best, constraint)
    return MatrixSolverReport(
        solution=best,
        converged=any_converged and res <= gate,
        iterations_used=total_iters,
        objective_value=best_obj,
        constraint_residual=res,
    )
