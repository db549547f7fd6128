"""Domain types and elementary operations for truncated-norm recovery.

Vectors and matrices are plain float64 numpy arrays; this module provides
the index-set algebra (truncation sets), q-norms, best-k-term machinery and
the cone-constraint predicate that the solvers and the analysis code share.
All indices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

__all__ = [
    "TruncationSet",
    "LpBall",
    "DantzigSelector",
    "NoiseConstraint",
    "NormTriple",
    "as_vector",
    "as_matrix",
    "qnorm",
    "restrict",
    "best_k_support",
    "sigma_k",
    "cone_constraint_holds",
    "CONE_TOL",
]

# Absolute slack used by inequality predicates on q-th-power values.
CONE_TOL = 1e-12


def as_vector(x) -> np.ndarray:
    """Validate and return a 1-d float array (finite entries, length >= 1)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInput(f"expected a nonempty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("vector contains NaN or infinite entries")
    return arr


def as_matrix(a) -> np.ndarray:
    """Validate and return a 2-d float array (finite entries, m, n >= 1)."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInput(f"expected a nonempty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix contains NaN or infinite entries")
    return arr


@dataclass(frozen=True)
class TruncationSet:
    """Index set T over {0, ..., ambient-1} with |T| >= 1.

    For vectors the ambient set is the coordinate range; for matrices it
    indexes positions in the descending singular-value ordering.
    """

    indices: tuple[int, ...]
    ambient: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(idx) == 0:
            raise InvalidInput("truncation set must be nonempty")
        if len(set(idx)) != len(idx):
            raise InvalidInput("truncation set has repeated indices")
        if idx[0] < 0 or idx[-1] >= self.ambient:
            raise InvalidInput(
                f"indices {idx} out of range for ambient size {self.ambient}"
            )
        object.__setattr__(self, "indices", idx)

    @classmethod
    def full(cls, ambient: int) -> "TruncationSet":
        return cls(tuple(range(ambient)), ambient)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in set(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.ambient, dtype=bool)
        m[list(self.indices)] = True
        return m

    def complement(self) -> "TruncationSet":
        comp = tuple(i for i in range(self.ambient) if i not in set(self.indices))
        if not comp:
            raise InvalidInput("complement of the full set is empty")
        return TruncationSet(comp, self.ambient)

    def complement_indices(self) -> tuple[int, ...]:
        """Like complement() but allowed to be empty (plain tuple)."""
        return tuple(i for i in range(self.ambient) if i not in set(self.indices))


@dataclass(frozen=True)
class LpBall:
    """Noise set {z : ||z||_p <= eta}."""

    p: float
    eta: float

    def __post_init__(self):
        if math.isnan(self.p) or self.p < 1.0:
            raise InvalidInput(f"p must be in [1, inf], got {self.p}")
        if self.eta < 0:
            raise InvalidInput("eta must be nonnegative")


@dataclass(frozen=True)
class DantzigSelector:
    """Noise set {z : ||A^T z||_inf <= eta} (Schatten-inf for linear maps)."""

    eta: float

    def __post_init__(self):
        if self.eta < 0:
            raise InvalidInput("eta must be nonnegative")


NoiseConstraint = LpBall | DantzigSelector


@dataclass(frozen=True)
class NormTriple:
    """Exponents (q, r, p) with 0 < q <= 1, q <= r <= inf, 1 <= p <= inf."""

    q: float
    r: float
    p: float

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise InvalidInput(f"q must be in (0, 1], got {self.q}")
        if self.r < self.q:
            raise InvalidInput(f"r must satisfy r >= q, got r={self.r}, q={self.q}")
        if math.isnan(self.p) or self.p < 1.0:
            raise InvalidInput(f"p must be in [1, inf], got {self.p}")

    @property
    def q_over_r(self) -> float:
        """Exponent q/r, taken as 0 when r is infinite."""
        return 0.0 if math.isinf(self.r) else self.q / self.r


def qnorm(x, q: float) -> float:
    """||x||_q = (sum |x_i|^q)^(1/q) for q > 0; max|x_i| for q = inf.

    Returns the norm itself, not its q-th power.
    """
    arr = as_vector(x)
    if q <= 0:
        raise InvalidInput(f"q must be positive, got {q}")
    a = np.abs(arr)
    if math.isinf(q):
        return float(a.max())
    if q == 1.0:
        return float(a.sum())
    if q == 2.0:
        return float(np.sqrt(np.dot(arr, arr)))
    return float(np.sum(a**q) ** (1.0 / q))


def restrict(x, s: TruncationSet) -> np.ndarray:
    """Vector equal to x on s and zero on the complement."""
    arr = as_vector(x)
    if s.ambient != arr.size:
        raise InvalidInput(
            f"set ambient {s.ambient} does not match vector length {arr.size}"
        )
    out = np.zeros_like(arr)
    idx = s.as_array()
    out[idx] = arr[idx]
    return out


def _ordered_by_magnitude(x: np.ndarray, t: TruncationSet) -> np.ndarray:
    """Indices of t sorted by decreasing |x_i|, ties broken toward lower index."""
    idx = t.as_array()
    # stable sort on -|x| keeps the ascending index order among ties
    order = np.argsort(-np.abs(x[idx]), kind="stable")
    return idx[order]


def best_k_support(x, t: TruncationSet, k: int) -> TruncationSet:
    """Index set of the k largest-magnitude coefficients of x on t.

    Deterministic: among equal magnitudes the lower index wins.
    """
    arr = as_vector(x)
    if t.ambient != arr.size:
        raise InvalidInput("set ambient does not match vector length")
    if not (1 <= k <= len(t)):
        raise InvalidInput(f"k={k} must satisfy 1 <= k <= |T|={len(t)}")
    top = _ordered_by_magnitude(arr, t)[:k]
    return TruncationSet(tuple(int(i) for i in top), t.ambient)


def sigma_k(x, t: TruncationSet, k: int, q: float) -> float:
    """Best k-term approximation error of x_T in the q-norm.

    Equals the q-norm of x_T with its k largest-magnitude entries removed;
    sigma_0 = ||x_T||_q and sigma_{|T|} = 0.
    """
    arr = as_vector(x)
    if t.ambient != arr.size:
        raise InvalidInput("set ambient does not match vector length")
    if not (0 <= k <= len(t)):
        raise InvalidInput(f"k={k} must satisfy 0 <= k <= |T|={len(t)}")
    if k == len(t):
        return 0.0
    tail = _ordered_by_magnitude(arr, t)[k:]
    return qnorm(np.abs(arr[tail]) if tail.size else np.zeros(1), q)


def cone_constraint_holds(x, xhat, t: TruncationSet, k: int, q: float) -> bool:
    """Check ||v_{T∩K^c}||_q^q <= 2 sigma_k(x_T)_q^q + ||v_{T∩K}||_q^q.

    Here v = xhat - x and K is the best-k support of x on T.  The
    inequality holds for any minimizer with ||xhat_T||_q^q <= ||x_T||_q^q;
    the predicate simply evaluates it with absolute slack CONE_TOL.
    """
    xa = as_vector(x)
    xh = as_vector(xhat)
    if xa.size != xh.size:
        raise InvalidInput("x and xhat must have the same length")
    v = xh - xa
    kset = best_k_support(xa, t, k)
    k_idx = kset.as_array()
    tk_c = np.asarray(
        [i for i in t.indices if i not in set(kset.indices)], dtype=int
    )
    lhs = float(np.sum(np.abs(v[tk_c]) ** q)) if tk_c.size else 0.0
    rhs = 2.0 * sigma_k(xa, t, k, q) ** q + float(np.sum(np.abs(v[k_idx]) ** q))
    return lhs <= rhs + CONE_TOL
