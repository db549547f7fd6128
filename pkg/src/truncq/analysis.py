"""Restricted isometry constants, sparse-approximation-property checks and
explicit error-bound constants.

The checkers are refuters: sampling plus ascent can only certify a
violation, never the "for all x" statement.  A Certified verdict is
attached only when the constants come from the isometry-based formulas
(with an exactly enumerated isometry constant), in which case sampling
serves as corroboration.  All coefficient formulas are implemented
symbol-for-symbol from their source displays, without algebraic
simplification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from .core import (
    NormTriple,
    TruncationSet,
    as_matrix,
    best_k_support,
    qnorm,
    sigma_k,
)
from .errors import (
    BetaOutOfRange,
    CombinatorialBlowup,
    DeltaOutOfRange,
    InvalidInput,
    TrivialNullSpace,
    WhichMismatch,
)
from .numerics import extremal_rayleigh

__all__ = [
    "ConstraintForm",
    "RipOrder",
    "BoundVariant",
    "RipEstimate",
    "Certified",
    "PassedSampling",
    "Violated",
    "TsapReport",
    "SearchBudget",
    "BoundReport",
    "rip_constant",
    "rip_constant_map",
    "tsap_check",
    "nsp_check",
    "tsap_constants_from_rip",
    "rip_lower_from_tsap",
    "bound_theorem23",
    "bound_theorem35",
    "bound_theorem36",
    "iff_condition_check",
]

VIOLATION_TOL = 1e-9
ENUM_CAP = 2_000_000
T_ENUM_CAP = 10_000


class ConstraintForm(Enum):
    LP = "lp"
    DANTZIG = "ds"


class RipOrder(Enum):
    ONE_K = "k"
    TWO_K = "2k"


class BoundVariant(Enum):
    RQ = "rq"  # bound on the r-norm error, any q <= r
    QQ_STRICT = "qq_strict"  # q-norm error, q < r
    QQ_EQUAL = "qq_equal"  # q-norm error, q = r


@dataclass(frozen=True)
class RipEstimate:
    k: int
    p: float
    delta: float
    extremal_support: TruncationSet | None
    exact: bool
    warning: str | None = None


@dataclass(frozen=True)
class Certified:
    source: str


@dataclass(frozen=True)
class PassedSampling:
    samples: int


@dataclass(frozen=True)
class Violated:
    witness_x: np.ndarray
    witness_t: TruncationSet
    witness_k: TruncationSet | None
    lhs: float
    rhs: float


Verdict = Certified | PassedSampling | Violated


@dataclass(frozen=True)
class TsapReport:
    k: int
    t: int
    norms: NormTriple
    d: float
    beta: float
    mode: ConstraintForm
    verdict: Verdict


@dataclass(frozen=True)
class SearchBudget:
    samples: int = 10_000
    restarts: int = 20
    ascent_steps: int = 60
    max_t_sets: int = 100
    seed: int = 0


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    inputs: dict = field(compare=False)
    noise_coefficient: float
    compressibility_coefficient: float
    bound_value: float


def _pow0(base: float, exponent: float) -> float:
    """Power with the 0^0 = 1 convention (t = k with q = r)."""
    if base == 0.0 and exponent == 0.0:
        return 1.0
    return base**exponent


# ---------------------------------------------------------------------------
# restricted isometry constants
# ---------------------------------------------------------------------------


def rip_constant(a, k: int, p: float = 2.0, *, enum_cap: int = ENUM_CAP,
                 sample_supports: int | None = None,
                 seed: int = 0) -> RipEstimate:
    """k-th restricted p-isometry constant of a matrix.

    For p = 2 and C(n, k) within the cap, enumerates every support and is
    exact (the delta is achieved on the reported support).  Otherwise a
    sampled lower bound is returned when sample_supports is given, and
    CombinatorialBlowup is raised when it is not.
    """
    arr = as_matrix(a)
    n = arr.shape[1]
    if not (1 <= k <= n):
        raise InvalidInput(f"k must be in [1, {n}], got {k}")
    count = math.comb(n, k)
    exact_mode = p == 2.0 and count <= enum_cap
    if not exact_mode and sample_supports is None:
        raise CombinatorialBlowup(
            f"C({n},{k}) = {count} exceeds cap {enum_cap}; "
            "pass sample_supports to get a sampled lower bound"
        )
    if exact_mode:
        supports = combinations(range(n), k)
    else:
        rng = np.random.default_rng(seed)
        supports = (
            tuple(sorted(rng.choice(n, size=k, replace=False)))
            for _ in range(sample_supports)
        )
    best_delta = -math.inf
    best_support = None
    for sup in supports:
        t_set = TruncationSet(tuple(sup), n)
        lo, hi = extremal_rayleigh(arr, t_set, p, seed=seed)
        dev = max(hi - 1.0, 1.0 - lo)
        if dev > best_delta:
            best_delta = dev
            best_support = t_set
    return RipEstimate(
        k=k,
        p=p,
        delta=float(max(best_delta, 0.0)),
        extremal_support=best_support,
        exact=exact_mode,
    )


def _map_factor_operator(sensing: np.ndarray, factor: np.ndarray,
                         side: str) -> np.ndarray:
    """Linear operator rows for A_i acting on one low-rank factor."""
    n_meas = sensing.shape[0]
    if side == "left":  # X = L R^T, optimize L: rows vec(A_i R)
        mats = np.einsum("imn,nk->imk", sensing, factor)
    else:  # optimize R: rows vec(A_i^T L)
        mats = np.einsum("imn,mk->ink", sensing, factor)
    return mats.reshape(n_meas, -1)


def rip_constant_map(lin_map, k: int, p: float = 2.0,
                     trials: int = 50, *, seed: int = 0,
                     refine_rounds: int = 5) -> RipEstimate:
    """Sampled LOWER bound on the matrix restricted p-isometry constant.

    Samples rank <= k matrices, measures the deviation of
    ||A(X)||_p^p / ||X||_F^p from 1 and, for p = 2, refines each sample by
    alternating maximization over the two low-rank factors.  Never exact.
    """
    sensing = lin_map.sensing
    m, n = lin_map.shape
    if not (1 <= k <= min(m, n)):
        raise InvalidInput(f"k must be in [1, {min(m, n)}], got {k}")
    if trials <= 0:
        return RipEstimate(k=k, p=p, delta=0.0, extremal_support=None,
                           exact=False, warning="no samples drawn")
    rng = np.random.default_rng(seed)
    g = sensing.reshape(sensing.shape[0], -1)

    def deviation(x_flat):
        nrm = np.linalg.norm(x_flat)
        if nrm == 0:
            return 0.0
        val = np.sum(np.abs(g @ (x_flat / nrm)) ** p)
        return max(val - 1.0, 1.0 - val)

    best = 0.0
    for _ in range(trials):
        left = rng.standard_normal((m, k))
        right = rng.standard_normal((n, k))
        x = left @ right.T
        best = max(best, deviation(x.ravel()))
        if p != 2.0:
            continue
        for _ in range(refine_rounds):
            for side in ("left", "right"):
                fac = right if side == "left" else left
                op = _map_factor_operator(sensing, fac, side)
                gram = op.T @ op
                w, vecs = np.linalg.eigh(gram)
                # chase whichever eigen-extreme deviates more from 1
                pick = -1 if w[-1] - 1.0 >= 1.0 - w[0] else 0
                v = vecs[:, pick]
                if side == "left":
                    left = v.reshape(m, k)
                else:
                    right = v.reshape(n, k)
        best = max(best, deviation((left @ right.T).ravel()))
    return RipEstimate(k=k, p=p, delta=float(best), extremal_support=None,
                       exact=False)


# ---------------------------------------------------------------------------
# TSAP / NSP refuters
# ---------------------------------------------------------------------------


def _t_set_pool(n: int, t: int, budget: SearchBudget, rng) -> list[TruncationSet]:
    if math.comb(n, t) <= T_ENUM_CAP:
        return [TruncationSet(c, n) for c in combinations(range(n), t)]
    seen = set()
    pool = []
    while len(pool) < budget.max_t_sets:
        cand = tuple(sorted(rng.choice(n, size=t, replace=False)))
        if cand not in seen:
            seen.add(cand)
            pool.append(TruncationSet(cand, n))
    return pool


def _measurement_q(a: np.ndarray, x: np.ndarray, norms: NormTriple,
                   mode: ConstraintForm) -> float:
    if mode is ConstraintForm.LP:
        return qnorm(a @ x, norms.p) ** norms.q
    return qnorm(a.T @ (a @ x), math.inf) ** norms.q


def _tsap_sides(a: np.ndarray, x: np.ndarray, t_set: TruncationSet, k: int,
                norms: NormTriple, mode: ConstraintForm):
    """Returns (lhs, measurement^q, k^{q/r-1} * sigma_k^q, K)."""
    kset = best_k_support(x, t_set, k)
    lhs = qnorm(x[kset.as_array()], norms.r) ** norms.q
    meas_q = _measurement_q(a, x, norms, mode)
    sig = sigma_k(x, t_set, k, norms.q) ** norms.q
    comp = k ** (norms.q_over_r - 1.0) * sig
    return lhs, meas_q, comp, kset


def _sample_vectors(n: int, t_set: TruncationSet, k: int, count: int, rng):
    """Mixture of dense, sparse and T-supported random probes."""
    idx = t_set.as_array()
    for i in range(count):
        mode = i % 3
        if mode == 0:
            yield rng.standard_normal(n)
        elif mode == 1:
            x = np.zeros(n)
            size = rng.integers(1, min(n, 2 * k + 2))
            sup = rng.choice(n, size=size, replace=False)
            x[sup] = rng.standard_normal(size)
            yield x
        else:
            x = np.zeros(n)
            x[idx] = rng.standard_normal(idx.size)
            yield x


def _ascend_ratio(a, t_set, k, norms, beta, mode, budget, rng):
    """Coordinate-ascent maximization of (lhs - beta term) / measurement^q.

    Returns the best ratio found and the vector attaining it.
    """
    n = a.shape[1]
    best_ratio = -math.inf
    best_x = None

    def ratio(x):
        lhs, meas_q, comp, _ = _tsap_sides(a, x, t_set, k, norms, mode)
        num = lhs - beta * comp
        if meas_q <= 1e-15:
            return math.inf if num > VIOLATION_TOL else -math.inf
        return num / meas_q

    for _ in range(budget.restarts):
        x = rng.standard_normal(n)
        x /= np.linalg.norm(x)
        fx = ratio(x)
        if math.isinf(fx) and fx > 0:
            return fx, x
        step = 0.5
        for _ in range(budget.ascent_steps):
            improved = False
            for i in range(n):
                for sign in (1.0, -1.0):
                    cand = x.copy()
                    cand[i] += sign * step
                    nrm = np.linalg.norm(cand)
                    if nrm == 0:
                        continue
                    cand /= nrm
                    fc = ratio(cand)
                    if fc > fx:
                        x, fx = cand, fc
                        improved = True
                        if math.isinf(fx):
                            return fx, x
            if not improved:
                step *= 0.5
                if step < 1e-6:
                    break
        if fx > best_ratio:
            best_ratio, best_x = fx, x
    return best_ratio, best_x


def tsap_check(a, k: int, t: int, norms: NormTriple, d: float, beta: float,
               mode: ConstraintForm = ConstraintForm.LP,
               budget: SearchBudget = SearchBudget(),
               certificate: str | None = None) -> TsapReport:
    """Search for violations of the sparse approximation inequality.

    Enumerates truncation sets when feasible, otherwise samples them; for
    each set draws random probes and runs normalized coordinate ascent on
    the critical ratio.  A Violated verdict carries a reproducible
    witness.  When `certificate` names the source of the constants (e.g.
    an isometry-based derivation) and no violation is found, the verdict
    is Certified; otherwise PassedSampling.
    """
    arr = as_matrix(a)
    n = arr.shape[1]
    if not (1 <= k <= t <= n):
        raise InvalidInput(f"need 1 <= k <= t <= n, got k={k}, t={t}, n={n}")
    rng = np.random.default_rng(budget.seed)
    t_pool = _t_set_pool(n, t, budget, rng)
    per_set = max(20, budget.samples // len(t_pool))
    total = 0
    for t_set in t_pool:
        for x in _sample_vectors(n, t_set, k, per_set, rng):
            total += 1
            lhs, meas_q, comp, kset = _tsap_sides(arr, x, t_set, k, norms, mode)
            rhs = d * meas_q + beta * comp
            if lhs > rhs + VIOLATION_TOL:
                return TsapReport(k, t, norms, d, beta, mode,
                                  Violated(x, t_set, kset, lhs, rhs))
        best_ratio, best_x = _ascend_ratio(
            arr, t_set, k, norms, beta, mode, budget, rng
        )
        if best_ratio > d + VIOLATION_TOL:
            lhs, meas_q, comp, kset = _tsap_sides(
                arr, best_x, t_set, k, norms, mode
            )
            return TsapReport(k, t, norms, d, beta, mode,
                              Violated(best_x, t_set, kset, lhs,
                                       d * meas_q + beta * comp))
    verdict = Certified(certificate) if certificate else PassedSampling(total)
    return TsapReport(k, t, norms, d, beta, mode, verdict)


def nsp_check(a, k: int, t: int, beta: float,
              budget: SearchBudget = SearchBudget(),
              norms: NormTriple = NormTriple(1.0, 1.0, 2.0)) -> TsapReport:
    """Truncated null space property check over a sampled kernel.

    Restricted to x in the null space of A the approximation inequality
    loses its measurement term: ||x_K||_r^q <= beta k^{q/r-1} sigma_k^q.
    """
    arr = as_matrix(a)
    n = arr.shape[1]
    # the thin SVD only carries min(m, n) right singular vectors, so take
    # the full decomposition to get a complete kernel basis
    _, s, vt = np.linalg.svd(arr, full_matrices=True)
    tol = max(arr.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > max(tol, 1e-12)))
    if rank >= n:
        raise TrivialNullSpace("matrix has full column rank")
    basis = vt.T[:, rank:]  # n x (n - rank)
    rng = np.random.default_rng(budget.seed)
    t_pool = _t_set_pool(n, t, budget, rng)
    per_set = max(20, budget.samples // len(t_pool))
    total = 0
    dim = basis.shape[1]
    for t_set in t_pool:
        probes = [basis[:, j] for j in range(dim)]
        probes += [basis @ rng.standard_normal(dim) for _ in range(per_set)]
        for x in probes:
            total += 1
            kset = best_k_support(x, t_set, k)
            lhs = qnorm(x[kset.as_array()], norms.r) ** norms.q
            comp = (k ** (norms.q_over_r - 1.0)
                    * sigma_k(x, t_set, k, norms.q) ** norms.q)
            rhs = beta * comp
            if lhs > rhs + VIOLATION_TOL:
                return TsapReport(k, t, norms, 0.0, beta, ConstraintForm.LP,
                                  Violated(x, t_set, kset, lhs, rhs))
    return TsapReport(k, t, norms, 0.0, beta, ConstraintForm.LP,
                      PassedSampling(total))


# ---------------------------------------------------------------------------
# constants from isometry, and the lower-isometry direction
# ---------------------------------------------------------------------------


def tsap_constants_from_rip(delta: float, t_factor: float, k: int,
                            tc_size: int, *, force: bool = False):
    """Constants (D1, D2, beta) implied by a 2-isometry constant.

    Requires delta_{t(k+|T^c|)} < sqrt((t-1)/t); D1 backs the lp-ball
    inequality, D2 the Dantzig-selector one, and beta < 1 is shared.
    """
    if not (0.0 <= delta < 1.0):
        raise DeltaOutOfRange(f"delta must be in [0, 1), got {delta}")
    if t_factor < 4.0 / 3.0:
        raise DeltaOutOfRange(f"t must be >= 4/3, got {t_factor}")
    if k < 1 or tc_size < 0:
        raise InvalidInput("need k >= 1 and tc_size >= 0")
    limit = math.sqrt((t_factor - 1.0) / t_factor)
    if delta >= limit and not force:
        raise DeltaOutOfRange(
            f"delta = {delta} >= sqrt((t-1)/t) = {limit}; "
            "the constants are not certified (use force=True to evaluate anyway)"
        )
    one_minus = 1.0 - delta**2
    beta = delta / math.sqrt((t_factor - 1.0) * one_minus)
    d1 = 2.0 * math.sqrt(1.0 + delta) / one_minus
    d2 = 2.0 * math.sqrt(2.0 * (k + tc_size)) / one_minus
    return d1, d2, beta


def rip_lower_from_tsap(d: float, beta: float, k: int, t: int, tc_size: int,
                        norms: NormTriple,
                        order: RipOrder = RipOrder.ONE_K) -> float:
    """Constant C with (1/C) ||x||_r^q <= ||Ax||_p^q on Sigma_k(T) or
    Sigma_2k(T).  |T ∩ K^c| is instantiated at its maximum t - k."""
    if not (0.0 < beta < 1.0):
        raise BetaOutOfRange(f"beta must be in (0, 1), got {beta}")
    if not (1 <= k <= t):
        raise InvalidInput("need 1 <= k <= t")
    maxterm = max((tc_size / k) ** norms.q, 1.0)
    if order is RipOrder.ONE_K:
        return (maxterm + 1.0) * d
    exponent = 1.0 - norms.q_over_r
    inner = (_pow0((t - k) / k, exponent) * 2.0 * beta / (1.0 - beta)) + 1.0
    return (2.0 / (1.0 - beta) + maxterm * inner) * d


# ---------------------------------------------------------------------------
# error-bound evaluators
# ---------------------------------------------------------------------------


def bound_theorem23(norms: NormTriple, d: float, beta: float, k: int, t: int,
                    tc_size: int, eps: float, eta: float, sigma: float,
                    which: BoundVariant = BoundVariant.RQ) -> BoundReport:
    """Coefficients and value of the stable-recovery error bounds.

    `sigma` is the best-k-term error sigma_k(x_T)_q (the norm, not its
    q-th power).  The three variants bound ||xhat - x||_r^q (RQ) or
    ||xhat - x||_q^q (the two QQ forms, for q < r and q = r).
    """
    if not (0.0 < beta < 1.0):
        raise BetaOutOfRange(f"beta must be in (0, 1), got {beta}")
    if not (1 <= k <= t):
        raise InvalidInput("need 1 <= k <= t")
    q, r = norms.q, norms.r
    qr = norms.q_over_r
    if which is BoundVariant.QQ_STRICT and not q < r:
        raise WhichMismatch("QQ_STRICT needs q < r")
    if which is BoundVariant.QQ_EQUAL and q != r:
        raise WhichMismatch("QQ_EQUAL needs q = r")
    maxterm = max((tc_size / k) ** q, 1.0)
    over = 1.0 / (1.0 - beta)
    if which is BoundVariant.RQ:
        bracket = maxterm + 1.0 + ((t - k) / k) ** qr
        nc = bracket * d * over
        cc = bracket * 2.0 * beta * over
        sig_term = k ** (qr - 1.0) * sigma**q
    elif which is BoundVariant.QQ_STRICT:
        ratio_pow = (tc_size / k) ** (1.0 - qr)
        nc = (maxterm * ratio_pow + 2.0) * d * over * k ** (1.0 - qr)
        cc = maxterm * ratio_pow * 2.0 * beta * over + 2.0 * (1.0 + beta) * over
        sig_term = sigma**q
    else:
        nc = (maxterm + 2.0) * d * over
        cc = maxterm * 2.0 * beta * over + 2.0 * (1.0 + beta) * over
        sig_term = sigma**q
    value = nc * (eps + eta) ** q + cc * sig_term
    return BoundReport(
        theorem="stable-recovery/truncated",
        inputs={"norms": norms, "D": d, "beta": beta, "k": k, "t": t,
                "tc_size": tc_size, "eps": eps, "eta": eta, "sigma": sigma,
                "which": which.value},
        noise_coefficient=nc,
        compressibility_coefficient=cc,
        bound_value=value,
    )


def bound_theorem35(delta: float, t_factor: float, k: int, tc_size: int,
                    t: int, eps: float, eta: float, sigma1: float,
                    mode: ConstraintForm = ConstraintForm.LP) -> BoundReport:
    """l2-error bound obtained by composing the isometry-derived constants
    with the q = 1, r = 2 stable-recovery coefficients."""
    d1, d2, beta = tsap_constants_from_rip(delta, t_factor, k, tc_size)
    d = d1 if mode is ConstraintForm.LP else d2
    inner = bound_theorem23(NormTriple(1.0, 2.0, 2.0), d, beta, k, t, tc_size,
                            eps, eta, sigma1, BoundVariant.RQ)
    return BoundReport(
        theorem="l2-stable-recovery/from-isometry",
        inputs={"delta": delta, "t_factor": t_factor, "k": k,
                "tc_size": tc_size, "t": t, "eps": eps, "eta": eta,
                "sigma1": sigma1, "mode": mode.value, "D": d, "beta": beta},
        noise_coefficient=inner.noise_coefficient,
        compressibility_coefficient=inner.compressibility_coefficient,
        bound_value=inner.bound_value,
    )


def bound_theorem36(delta: float, t_factor: float, k: int, eps: float,
                    eta: float, sigma1: float,
                    mode: ConstraintForm = ConstraintForm.LP) -> BoundReport:
    """Classic (T^c empty) l2 error bound with its own constant grouping.

    bound = nc * (eps + eta) + cc * sigma_k(x)_1 / sqrt(k).
    """
    if not (0.0 <= delta < 1.0):
        raise DeltaOutOfRange(f"delta must be in [0, 1), got {delta}")
    s = math.sqrt((t_factor - 1.0) * (1.0 - delta**2))
    if s <= delta:
        raise DeltaOutOfRange(
            f"delta = {delta} violates delta < sqrt((t-1)/t) for t = {t_factor}"
        )
    one_minus = 1.0 - delta**2
    if mode is ConstraintForm.LP:
        nc = (2.0 * math.sqrt(1.0 + delta) * (3.0 * s + delta)
              / (one_minus * (s - delta)))
    else:
        nc = (2.0 * math.sqrt(2.0 * k) * (3.0 * s + delta)
              / (one_minus * (s - delta)))
    cc = 2.0 * (s + delta) ** 2 / (s * (s - delta))
    value = nc * (eps + eta) + cc * sigma1 / math.sqrt(k)
    return BoundReport(
        theorem="l2-stable-recovery/classic",
        inputs={"delta": delta, "t_factor": t_factor, "k": k, "eps": eps,
                "eta": eta, "sigma1": sigma1, "mode": mode.value},
        noise_coefficient=nc,
        compressibility_coefficient=cc,
        bound_value=value,
    )


# ---------------------------------------------------------------------------
# iff characterization (q = r case)
# ---------------------------------------------------------------------------


def iff_condition_check(a, k: int, t: int, q: float, d: float, beta: float,
                        mode: ConstraintForm = ConstraintForm.LP,
                        budget: SearchBudget = SearchBudget(),
                        p: float = 2.0) -> TsapReport:
    """Sample pairs (y, x) against the pairwise characterization

    ||(y-x)_T||_q^q <= (1+beta)/(1-beta) (||y_T||_q^q - ||x_T||_q^q
        + 2 sigma_k(x_T)_q^q) + 2D/(1-beta) ||A(y-x)||_p^q

    (Dantzig form replaces the measurement term accordingly).
    """
    if not (0.0 < beta < 1.0):
        raise BetaOutOfRange(f"beta must be in (0, 1), got {beta}")
    arr = as_matrix(a)
    n = arr.shape[1]
    norms = NormTriple(q, q, p)
    rng = np.random.default_rng(budget.seed)
    t_pool = _t_set_pool(n, t, budget, rng)
    per_set = max(20, budget.samples // len(t_pool))
    total = 0
    c_pair = (1.0 + beta) / (1.0 - beta)
    c_meas = 2.0 * d / (1.0 - beta)
    for t_set in t_pool:
        idx = t_set.as_array()
        for i in range(per_set):
            total += 1
            x = rng.standard_normal(n)
            if i % 3 == 0:
                y = x + rng.standard_normal(n) * 0.1
            elif i % 3 == 1:
                # stress: shrink y on T so ||y_T|| < ||x_T||
                y = x.copy()
                y[idx] *= rng.uniform(0.0, 1.0)
            else:
                y = rng.standard_normal(n)
            v = y - x
            lhs = float(np.sum(np.abs(v[idx]) ** q))
            gap = (float(np.sum(np.abs(y[idx]) ** q))
                   - float(np.sum(np.abs(x[idx]) ** q))
                   + 2.0 * sigma_k(x, t_set, k, q) ** q)
            meas = _measurement_q(arr, v, norms, mode)
            rhs = c_pair * gap + c_meas * meas
            if lhs > rhs + VIOLATION_TOL:
                return TsapReport(k, t, norms, d, beta, mode,
                                  Violated(np.concatenate([y, x]), t_set,
                                           None, lhs, rhs))
    return TsapReport(k, t, norms, d, beta, mode, PassedSampling(total))
