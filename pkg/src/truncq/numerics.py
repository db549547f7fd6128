"""Dense linear algebra and proximal operators.

Everything here is deterministic and desk-scale (dims up to a few hundred):
SVD with a fixed sign convention, a from-scratch cyclic Jacobi symmetric
eigensolver (used as an independent code path by the RIP machinery and the
test oracles), extremal Rayleigh quotients over supports, least squares,
soft-thresholding and norm-ball projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TruncationSet, as_matrix, as_vector
from .errors import InvalidInput, NumericalFailure, Unsupported

__all__ = [
    "SvdFactorization",
    "svd",
    "jacobi_eigh",
    "extremal_rayleigh",
    "soft_threshold",
    "project_lp_ball",
    "least_squares",
]


@dataclass(frozen=True)
class SvdFactorization:
    """Thin SVD X = U diag(s) V^T with s sorted descending."""

    u: np.ndarray  # m x l
    singular_values: np.ndarray  # length l = min(m, n), nonincreasing
    v: np.ndarray  # n x l

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.v.T


def svd(x) -> SvdFactorization:
    """Thin SVD with deterministic signs.

    Each left singular vector is flipped so that its entry of largest
    magnitude is positive (ties: first such entry), which makes the
    factorization reproducible across runs.
    """
    arr = as_matrix(x)
    try:
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    v = vt.T
    for j in range(u.shape[1]):
        col = u[:, j]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            u[:, j] = -col
            v[:, j] = -v[:, j]
    return SvdFactorization(u=u, singular_values=s, v=v)


def jacobi_eigh(s, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for a symmetric matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending
    and eigenvectors as columns.  Independent of LAPACK; used as the second
    code path for restricted-isometry computations and as a test oracle
    for svd().
    """
    a = as_matrix(s).copy()
    n = a.shape[0]
    if a.shape[1] != n:
        raise InvalidInput("jacobi_eigh needs a square matrix")
    if not np.allclose(a, a.T, atol=1e-10 * (1.0 + np.abs(a).max())):
        raise InvalidInput("jacobi_eigh needs a symmetric matrix")
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    scale = max(1.0, float(np.abs(a).max()))

    def offdiag_norm(m):
        # summing the off-diagonal squares directly avoids the cancellation
        # floor of ||m||_F^2 - ||diag||_F^2
        return math.sqrt(float(((m - np.diag(m.diagonal())) ** 2).sum()))

    for _ in range(max_sweeps):
        off = offdiag_norm(a)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 0.5 * tol * scale / n:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                rp = a[:, p].copy()
                rq = a[:, q].copy()
                a[:, p] = c * rp - sn * rq
                a[:, q] = sn * rp + c * rq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                gp = v[:, p].copy()
                gq = v[:, q].copy()
                v[:, p] = c * gp - sn * gq
                v[:, q] = sn * gp + c * gq
    off = offdiag_norm(a)
    if off > tol * scale * 10.0:
        raise NumericalFailure("Jacobi eigensolver did not converge")
    w = a.diagonal().copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def _rayleigh_estimate_p(a_s: np.ndarray, p: float, starts: int, rng) -> tuple:
    """Sampled min/max of ||A_S x||_p^p over the unit sphere (p < 2).

    Projected gradient ascent/descent from random starts; this is a
    heuristic bracket, not a certificate.
    """
    dim = a_s.shape[1]

    def val(x):
        return float(np.sum(np.abs(a_s @ x) ** p))

    def grad(x):
        y = a_s @ x
        g = a_s.T @ (p * np.sign(y) * np.maximum(np.abs(y), 1e-12) ** (p - 1.0))
        return g

    lo, hi = math.inf, -math.inf
    for _ in range(starts):
        for sense in (+1.0, -1.0):
            x = rng.standard_normal(dim)
            x /= np.linalg.norm(x)
            step = 0.1
            fx = val(x)
            for _ in range(200):
                g = grad(x) * sense
                cand = x + step * g
                nrm = np.linalg.norm(cand)
                if nrm == 0:
                    break
                cand /= nrm
                fc = val(cand)
                if sense * fc > sense * fx:
                    x, fx = cand, fc
                else:
                    step *= 0.5
                    if step < 1e-10:
                        break
            lo = min(lo, fx)
            hi = max(hi, fx)
    return lo, hi


def extremal_rayleigh(a, support: TruncationSet, p: float = 2.0, *,
                      starts: int = 50, seed: int = 0):
    """Extremes of ||A x||_p^p / ||x||_2^p over x supported on the set.

    For p = 2 these are the exact extreme eigenvalues of A_S^T A_S
    (computed by the Jacobi eigensolver).  For 0 < p <= 1 a sampled
    estimate from projected-gradient starts is returned; it is not exact.
    """
    arr = as_matrix(a)
    if len(support) == 0:
        raise InvalidInput("support must be nonempty")
    if support.ambient != arr.shape[1]:
        raise InvalidInput("support ambient does not match column count")
    a_s = arr[:, support.as_array()]
    if p == 2.0:
        gram = a_s.T @ a_s
        w, _ = jacobi_eigh(gram)
        return float(w[-1]), float(w[0])
    if 0.0 < p <= 1.0:
        rng = np.random.default_rng(seed)
        return _rayleigh_estimate_p(a_s, p, starts, rng)
    raise Unsupported(f"extremal_rayleigh supports p=2 or 0<p<=1, got {p}")


def soft_threshold(v, weights) -> np.ndarray:
    """Entrywise sign(v) * max(|v| - w, 0); prox of the weighted l1 norm."""
    arr = as_vector(v)
    w = as_vector(weights)
    if arr.size != w.size:
        raise InvalidInput("v and weights must have the same length")
    if np.any(w < 0):
        raise InvalidInput("weights must be nonnegative")
    return np.sign(arr) * np.maximum(np.abs(arr) - w, 0.0)


def _project_l1(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the l1 ball (sorting algorithm)."""
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    if radius == 0.0:
        return np.zeros_like(v)
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, a.size + 1)
    cond = u - (css - radius) / ks > 0
    rho = int(np.nonzero(cond)[0][-1])
    theta = (css[rho] - radius) / (rho + 1)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def project_lp_ball(v, p: float, radius: float) -> np.ndarray:
    """Euclidean projection of v onto {x : ||x||_p <= radius}, p in {1,2,inf}."""
    arr = as_vector(v)
    if radius < 0:
        raise InvalidInput("radius must be nonnegative")
    if p == 2.0:
        nrm = np.linalg.norm(arr)
        if nrm <= radius:
            return arr.copy()
        return arr * (radius / nrm) if nrm > 0 else arr.copy()
    if p == 1.0:
        return _project_l1(arr, radius)
    if math.isinf(p):
        return np.clip(arr, -radius, radius)
    raise Unsupported(f"projection implemented for p in {{1, 2, inf}}, got {p}")


def least_squares(a, b) -> np.ndarray:
    """Minimum-norm least-squares solution of A x ~= b."""
    arr = as_matrix(a)
    rhs = as_vector(b)
    if rhs.size != arr.shape[0]:
        raise InvalidInput("b length does not match row count of A")
    x, *_ = np.linalg.lstsq(arr, rhs, rcond=None)
    return x
