import math

import numpy as np
import pytest

from truncq.core import DantzigSelector, LpBall
from truncq.errors import Infeasible, InvalidInput
from truncq.numerics import svd
from truncq.solvers_matrix import (
    LinearMatrixMap,
    apply_adjoint,
    apply_map,
    matrix_constraint_residual,
    schatten_qnorm,
    solve_truncated_schatten,
    truncated_schatten_objective,
    truncated_sv_shrink,
)
from truncq.solvers_vector import SolverConfig


def gaussian_map(l, m, n, seed):
    rng = np.random.default_rng(seed)
    return LinearMatrixMap(rng.standard_normal((l, m, n)) / math.sqrt(l))


class TestLinearMatrixMap:
    def test_shape_validation(self):
        with pytest.raises(InvalidInput):
            LinearMatrixMap(np.zeros((2, 3)))
        with pytest.raises(InvalidInput):
            LinearMatrixMap(np.full((1, 2, 2), np.nan))

    def test_identity_vectorization(self):
        lm = LinearMatrixMap.identity_vectorization(2, 3)
        x = np.arange(6.0).reshape(2, 3)
        assert np.allclose(apply_map(lm, x), x.ravel())

    def test_linearity(self):
        lm = gaussian_map(7, 3, 4, 0)
        rng = np.random.default_rng(1)
        x, y = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
        lhs = apply_map(lm, 2.0 * x - 3.0 * y)
        rhs = 2.0 * apply_map(lm, x) - 3.0 * apply_map(lm, y)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_adjoint_identity(self):
        lm = gaussian_map(9, 4, 5, 2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.standard_normal((4, 5))
            y = rng.standard_normal(9)
            lhs = float(apply_map(lm, x) @ y)
            rhs = float(np.sum(x * apply_adjoint(lm, y)))
            assert lhs == pytest.approx(rhs, abs=1e-12, rel=1e-12)

    def test_shape_mismatch(self):
        lm = gaussian_map(5, 3, 3, 4)
        with pytest.raises(InvalidInput):
            apply_map(lm, np.zeros((2, 3)))
        with pytest.raises(InvalidInput):
            apply_adjoint(lm, np.zeros(4))


class TestSchattenNorms:
    def test_known_values(self):
        x = np.diag([3.0, 4.0])
        assert schatten_qnorm(x, 1.0) == pytest.approx(7.0)
        assert schatten_qnorm(x, 2.0) == pytest.approx(5.0)
        assert schatten_qnorm(x, math.inf) == pytest.approx(4.0)

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((4, 4))
        u, _, vt = np.linalg.svd(rng.standard_normal((4, 4)))
        for q in (0.3, 0.5, 1.0):
            assert schatten_qnorm(u @ x @ vt, q) == pytest.approx(
                schatten_qnorm(x, q), rel=1e-10
            )

    def test_truncated_objective(self):
        x = np.diag([5.0, 3.0, 1.0])
        assert truncated_schatten_objective(x, 2, 1.0) == pytest.approx(4.0)
        assert truncated_schatten_objective(x, 3, 1.0) == pytest.approx(9.0)


class TestSchattenOrthogonalAdditivity:
    """Orthogonal rows and columns make the Schatten q-th power additive."""

    @pytest.mark.parametrize("q", [0.3, 0.5, 1.0])
    def test_block_construction(self, q):
        rng = np.random.default_rng(6)
        for _ in range(200):
            a = rng.standard_normal((3, 2))
            b = rng.standard_normal((2, 3))
            x = np.zeros((5, 5))
            y = np.zeros((5, 5))
            x[:3, :2] = a
            y[3:, 2:] = b
            assert x.T @ y == pytest.approx(np.zeros((5, 5)), abs=0)
            lhs = schatten_qnorm(x + y, q) ** q
            rhs = schatten_qnorm(x, q) ** q + schatten_qnorm(y, q) ** q
            assert lhs == pytest.approx(rhs, abs=1e-10)

    @pytest.mark.parametrize("q", [0.3, 0.5, 1.0])
    def test_norm_superadditive(self, q):
        # for q <= 1 the combined Schatten norm dominates the sum
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = np.zeros((4, 4))
            y = np.zeros((4, 4))
            x[:2, :2] = rng.standard_normal((2, 2))
            y[2:, 2:] = rng.standard_normal((2, 2))
            assert schatten_qnorm(x + y, q) >= (
                schatten_qnorm(x, q) + schatten_qnorm(y, q) - 1e-10
            )


class TestSingularValuePerturbation:
    """sum |f(sv_j(X)) - f(sv_j(Y))| <= sum f(sv_j(X - Y)) for concave f."""

    @pytest.mark.parametrize("q", [0.3, 0.5, 1.0])
    def test_random_pairs(self, q):
        rng = np.random.default_rng(8)
        for _ in range(300):
            x = rng.standard_normal((5, 4))
            y = rng.standard_normal((5, 4))
            sx = svd(x).singular_values
            sy = svd(y).singular_values
            sd = svd(x - y).singular_values
            for k in range(1, 5):
                lhs = float(np.sum(np.abs(sx[:k] ** q - sy[:k] ** q)))
                rhs = float(np.sum(sd[:k] ** q))
                assert lhs <= rhs + 1e-10


class TestTruncatedSvShrink:
    def test_protect_all_is_identity(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((4, 4))
        assert np.array_equal(truncated_sv_shrink(x, 0.5, 4), x)

    def test_zero_threshold_is_identity(self):
        x = np.diag([2.0, 1.0])
        assert np.array_equal(truncated_sv_shrink(x, 0.0, 0), x)

    def test_shrinks_only_tail(self):
        x = np.diag([5.0, 2.0, 0.3])
        out = truncated_sv_shrink(x, 0.5, 1)
        s = svd(out).singular_values
        assert s[0] == pytest.approx(5.0)
        assert s[1] == pytest.approx(1.5)
        assert s[2] == pytest.approx(0.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            truncated_sv_shrink(np.eye(2), -0.1, 0)
        with pytest.raises(InvalidInput):
            truncated_sv_shrink(np.eye(2), 0.1, 3)


class TestSolveTruncatedSchatten:
    def test_rank1_noiseless_recovery(self):
        rng = np.random.default_rng(0)
        lm = gaussian_map(80, 8, 8, 0)
        x0 = np.outer(rng.standard_normal(8), rng.standard_normal(8))
        b = apply_map(lm, x0)
        rep = solve_truncated_schatten(lm, b, 8, 1.0, LpBall(2.0, 0.0))
        assert rep.converged
        err = np.linalg.norm(rep.solution - x0) / np.linalg.norm(x0)
        assert err <= 1e-3

    def test_truncation_protects_leading_subspace(self):
        # rank-2 truth, protect 2 leading singular values (t = l - 2)
        rng = np.random.default_rng(1)
        lm = gaussian_map(60, 6, 6, 1)
        x0 = (np.outer(rng.standard_normal(6), rng.standard_normal(6))
              + np.outer(rng.standard_normal(6), rng.standard_normal(6)))
        b = apply_map(lm, x0)
        rep = solve_truncated_schatten(lm, b, 4, 1.0, LpBall(2.0, 0.0))
        err = np.linalg.norm(rep.solution - x0) / np.linalg.norm(x0)
        assert err <= 1e-3

    def test_dantzig_mode(self):
        rng = np.random.default_rng(2)
        lm = gaussian_map(64, 6, 6, 2)
        x0 = np.outer(rng.standard_normal(6), rng.standard_normal(6))
        b = apply_map(lm, x0)
        rep = solve_truncated_schatten(lm, b, 6, 1.0, DantzigSelector(0.01))
        res = matrix_constraint_residual(lm, b, rep.solution,
                                         DantzigSelector(0.01))
        assert res <= 1e-6
        assert np.linalg.norm(rep.solution - x0) / np.linalg.norm(x0) <= 0.1

    def test_q_below_one(self):
        rng = np.random.default_rng(3)
        lm = gaussian_map(70, 6, 6, 3)
        x0 = np.outer(rng.standard_normal(6), rng.standard_normal(6))
        b = apply_map(lm, x0)
        rep = solve_truncated_schatten(lm, b, 6, 0.5, LpBall(2.0, 0.0))
        assert np.linalg.norm(rep.solution - x0) / np.linalg.norm(x0) <= 1e-2

    def test_noisy_feasibility(self):
        rng = np.random.default_rng(4)
        lm = gaussian_map(50, 5, 5, 4)
        x0 = np.outer(rng.standard_normal(5), rng.standard_normal(5))
        b = apply_map(lm, x0) + rng.standard_normal(50) * 0.01
        rep = solve_truncated_schatten(lm, b, 5, 1.0, LpBall(2.0, 0.2))
        assert rep.constraint_residual <= 1e-6

    def test_validation(self):
        lm = gaussian_map(10, 3, 3, 5)
        with pytest.raises(InvalidInput):
            solve_truncated_schatten(lm, np.zeros(10), 4, 1.0,
                                     LpBall(2.0, 0.0))
        with pytest.raises(InvalidInput):
            solve_truncated_schatten(lm, np.zeros(10), 2, 1.5,
                                     LpBall(2.0, 0.0))
        with pytest.raises(InvalidInput):
            solve_truncated_schatten(lm, np.zeros(9), 2, 1.0,
                                     LpBall(2.0, 0.0))

    def test_infeasible_equality(self):
        # a map with a 1-dimensional range cannot match a generic b
        sensing = np.zeros((2, 2, 2))
        sensing[0, 0, 0] = 1.0
        sensing[1, 0, 0] = 1.0
        lm = LinearMatrixMap(sensing)
        with pytest.raises(Infeasible):
            solve_truncated_schatten(lm, np.array([1.0, 2.0]), 2, 1.0,
                                     LpBall(2.0, 0.0))

    def test_objective_reported(self):
        rng = np.random.default_rng(6)
        lm = gaussian_map(40, 5, 5, 6)
        x0 = np.outer(rng.standard_normal(5), rng.standard_normal(5))
        b = apply_map(lm, x0)
        rep = solve_truncated_schatten(lm, b, 3, 1.0, LpBall(2.0, 0.0),
                                       SolverConfig(max_iterations=5000))
        assert rep.objective_value == pytest.approx(
            truncated_schatten_objective(rep.solution, 3, 1.0), abs=1e-10
        )


class TestMatrixConeConstraint:
    """Schatten error decomposition inherited from the perturbation lemma."""

    @pytest.mark.parametrize("q", [0.5, 1.0])
    def test_enforced_hypothesis_random_pairs(self, q):
        rng = np.random.default_rng(10)
        k, t = 2, 4
        for _ in range(200):
            x = rng.standard_normal((8, 8))
            xhat = rng.standard_normal((8, 8))
            sx = svd(x).singular_values
            sh = svd(xhat).singular_values
            # T = positions of the t smallest singular values
            t_idx = np.arange(8 - t, 8)
            # enforce ||xhat_T||^q <= ||x_T||^q by scaling xhat
            num = float(np.sum(sx[t_idx] ** q))
            den = float(np.sum(sh[t_idx] ** q))
            if den > num and den > 0:
                xhat = xhat * (num / den) ** (1.0 / q) * 0.999
                sh = svd(xhat).singular_values
            v = xhat - x
            sv = svd(v).singular_values
            # K = top-k positions of sv(x) within T (descending order: the
            # first k of T); sigma_k drops them
            lhs = float(np.sum(sv[t_idx[k:]] ** q))
            sigma = float(np.sum(sx[t_idx[k:]] ** q))
            rhs = 2.0 * sigma + float(np.sum(sv[t_idx[:k]] ** q))
            assert lhs <= rhs + 1e-12
