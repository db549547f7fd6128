import math

import numpy as np
import pytest

from oracle_lp import truncated_l1_vertex_min
from truncq.core import (
    DantzigSelector,
    LpBall,
    TruncationSet,
    cone_constraint_holds,
    qnorm,
    restrict,
)
from truncq.errors import Infeasible, InvalidInput, Unsupported
from truncq.harness import gaussian_matrix, sparse_signal
from truncq.numerics import least_squares
from truncq.solvers_vector import (
    FirstJump,
    SolverConfig,
    TopJ,
    constraint_residual,
    isd_recover,
    solve_truncated_l1,
    solve_truncated_l1_ds,
    solve_truncated_lq,
)

FAST = SolverConfig(max_iterations=5000, tolerance=1e-9)


def support_complement(x0):
    n = x0.size
    comp = tuple(i for i in range(n) if x0[i] == 0.0)
    return TruncationSet(comp, n)


class TestTruncatedL1:
    def test_identity_full_truncation(self):
        b = np.array([1.0, -2.0, 0.5])
        rep = solve_truncated_l1(np.eye(3), b, TruncationSet.full(3),
                                 LpBall(2.0, 0.0), FAST)
        assert rep.converged
        assert np.allclose(rep.solution, b, atol=1e-6)

    def test_free_coordinate_absorbs_measurement(self):
        # A = [I2 | I2], b = (1, 0); coordinate 0 is unpenalized so the
        # optimum routes everything through it and the objective is 0
        a = np.hstack([np.eye(2), np.eye(2)])
        b = np.array([1.0, 0.0])
        rep = solve_truncated_l1(a, b, TruncationSet((1, 2, 3), 4),
                                 LpBall(2.0, 0.0), FAST)
        assert rep.converged
        assert np.allclose(rep.solution, [1.0, 0.0, 0.0, 0.0], atol=1e-5)
        assert rep.objective_value <= 1e-8
        # cross-check with the exhaustive LP vertex oracle
        opt, _ = truncated_l1_vertex_min(a, b, (1, 2, 3))
        assert rep.objective_value == pytest.approx(opt, abs=1e-6)

    def test_oracle_support_noiseless(self):
        x0 = sparse_signal(128, 5, seed=11)
        a = gaussian_matrix(64, 128, 11)
        b = a @ x0
        rep = solve_truncated_l1(a, b, support_complement(x0),
                                 LpBall(2.0, 0.0))
        # independent oracle: least squares on the true support
        sup = np.flatnonzero(x0)
        dense = least_squares(a[:, sup], b)
        oracle = np.zeros(128)
        oracle[sup] = dense
        assert np.linalg.norm(rep.solution - x0) <= 1e-5
        assert np.linalg.norm(rep.solution - oracle) <= 1e-5

    def test_infeasible_equality(self):
        a = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        b = np.array([1.0, 1.0, 1.0])  # third row unreachable
        with pytest.raises(Infeasible):
            solve_truncated_l1(a, b, TruncationSet.full(2), LpBall(2.0, 0.0))

    def test_unsupported_p(self):
        with pytest.raises(Unsupported):
            solve_truncated_l1(np.eye(2), np.ones(2), TruncationSet.full(2),
                               LpBall(1.5, 0.1))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInput):
            solve_truncated_l1(np.eye(3), np.ones(2), TruncationSet.full(3),
                               LpBall(2.0, 0.0))

    @pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
    def test_noisy_feasibility(self, p):
        a = gaussian_matrix(20, 40, 3)
        x0 = sparse_signal(40, 3, seed=3)
        b = a @ x0
        rep = solve_truncated_l1(a, b, TruncationSet.full(40), LpBall(p, 0.1))
        assert rep.converged
        assert constraint_residual(a, b, rep.solution, LpBall(p, 0.1)) <= 1e-5

    def test_objective_matches_truncated_norm(self):
        a = gaussian_matrix(16, 24, 4)
        b = a @ sparse_signal(24, 3, seed=4)
        t = TruncationSet(tuple(range(12)), 24)
        rep = solve_truncated_l1(a, b, t, LpBall(2.0, 0.05), FAST)
        assert rep.objective_value == pytest.approx(
            qnorm(restrict(rep.solution, t), 1.0), abs=1e-10
        )

    def test_deterministic(self):
        a = gaussian_matrix(12, 20, 5)
        b = a @ sparse_signal(20, 2, seed=5)
        r1 = solve_truncated_l1(a, b, TruncationSet.full(20),
                                LpBall(2.0, 0.0), FAST)
        r2 = solve_truncated_l1(a, b, TruncationSet.full(20),
                                LpBall(2.0, 0.0), FAST)
        assert np.array_equal(r1.solution, r2.solution)
        assert r1.iterations_used == r2.iterations_used


class TestVertexOracleAgreement:
    @pytest.mark.parametrize("m,n,k,seed", [(4, 6, 2, 0), (6, 8, 2, 1),
                                            (8, 10, 3, 2), (6, 10, 2, 3)])
    def test_small_instances(self, m, n, k, seed):
        a = gaussian_matrix(m, n, seed)
        x0 = sparse_signal(n, k, seed=seed + 100)
        b = a @ x0
        t = TruncationSet.full(n)
        rep = solve_truncated_l1(a, b, t, LpBall(2.0, 0.0), FAST)
        opt, _ = truncated_l1_vertex_min(a, b, range(n))
        assert rep.converged
        assert rep.objective_value == pytest.approx(opt, abs=1e-6)

    def test_truncated_instance(self):
        a = gaussian_matrix(5, 8, 9)
        x0 = sparse_signal(8, 2, seed=9)
        b = a @ x0
        t_idx = tuple(range(1, 8))
        rep = solve_truncated_l1(a, b, TruncationSet(t_idx, 8),
                                 LpBall(2.0, 0.0), FAST)
        opt, _ = truncated_l1_vertex_min(a, b, t_idx)
        assert rep.objective_value == pytest.approx(opt, abs=1e-6)


class TestDantzigSelector:
    def test_zero_measurements(self):
        a = gaussian_matrix(10, 15, 0)
        rep = solve_truncated_l1_ds(a, np.zeros(10), TruncationSet.full(15),
                                    0.5, FAST)
        assert rep.converged
        assert np.allclose(rep.solution, 0.0, atol=1e-7)
        assert rep.objective_value <= 1e-10

    def test_large_eta_returns_zero(self):
        a = gaussian_matrix(10, 15, 1)
        b = a @ sparse_signal(15, 2, seed=1)
        eta = float(np.max(np.abs(a.T @ b))) * 1.01
        rep = solve_truncated_l1_ds(a, b, TruncationSet.full(15), eta, FAST)
        assert rep.objective_value <= 1e-8

    def test_oracle_support_noiseless(self):
        a = gaussian_matrix(64, 128, 21)
        a = a / np.linalg.norm(a, axis=0)
        x0 = sparse_signal(128, 5, seed=21)
        b = a @ x0
        rep = solve_truncated_l1(a, b, support_complement(x0),
                                 DantzigSelector(0.0))
        assert np.linalg.norm(rep.solution - x0) <= 1e-4

    def test_feasibility(self):
        a = gaussian_matrix(16, 24, 2)
        b = a @ sparse_signal(24, 3, seed=2)
        rep = solve_truncated_l1_ds(a, b, TruncationSet.full(24), 0.05)
        assert rep.converged
        assert float(np.max(np.abs(a.T @ (a @ rep.solution - b)))) <= 0.05 + 1e-6


class TestTruncatedLq:
    def test_identity_is_point_feasible(self):
        b = np.array([0.5, -1.5, 2.0])
        rep = solve_truncated_lq(np.eye(3), b, TruncationSet.full(3), 0.5,
                                 LpBall(2.0, 0.0), FAST)
        assert np.allclose(rep.solution, b, atol=1e-5)

    def test_rejects_q_out_of_range(self):
        with pytest.raises(InvalidInput):
            solve_truncated_lq(np.eye(2), np.ones(2), TruncationSet.full(2),
                               1.0, LpBall(2.0, 0.0))

    def test_descent_from_least_squares_init(self):
        a = gaussian_matrix(20, 40, 6)
        b = a @ sparse_signal(40, 4, seed=6)
        t = TruncationSet.full(40)
        q = 0.5
        rep = solve_truncated_lq(a, b, t, q, LpBall(2.0, 0.0), FAST)
        x_ls = least_squares(a, b)
        init_obj = float(np.sum(np.abs(x_ls) ** q))
        assert rep.objective_value <= init_obj + 1e-8

    def test_q_half_beats_q_one_success_rate(self):
        # fewer measurements than l1 needs: q < 1 should do at least as well
        cfg = SolverConfig(max_iterations=3000, tolerance=1e-8)
        wins_half = wins_one = 0
        trials = 50
        for seed in range(trials):
            a = gaussian_matrix(48, 128, seed)
            x0 = sparse_signal(128, 5, seed=seed + 500)
            b = a @ x0
            t = TruncationSet.full(128)
            r_half = solve_truncated_lq(a, b, t, 0.5, LpBall(2.0, 0.0), cfg)
            r_one = solve_truncated_l1(a, b, t, LpBall(2.0, 0.0), cfg)
            nrm = np.linalg.norm(x0)
            wins_half += np.linalg.norm(r_half.solution - x0) <= 1e-4 * nrm
            wins_one += np.linalg.norm(r_one.solution - x0) <= 1e-4 * nrm
        assert wins_half >= wins_one

    def test_zero_rhs(self):
        a = gaussian_matrix(8, 12, 7)
        rep = solve_truncated_lq(a, np.zeros(8), TruncationSet.full(12), 0.5,
                                 LpBall(2.0, 0.0), FAST)
        assert np.all(rep.solution == 0.0)
        assert rep.converged


class TestConeConstraintOnSolverOutput:
    def test_minimizer_error_lands_in_cone(self):
        # any solution with ||xhat_T||_1 <= ||x_T||_1 obeys the cone bound
        for seed in range(10):
            a = gaussian_matrix(24, 48, seed)
            x0 = sparse_signal(48, 4, seed=seed + 50)
            b = a @ x0
            t = support_complement(x0)
            rep = solve_truncated_l1(a, b, t, LpBall(2.0, 0.0), FAST)
            t_obj = float(np.sum(np.abs(x0[t.as_array()])))
            if rep.objective_value <= t_obj + 1e-9:
                assert cone_constraint_holds(x0, rep.solution, t,
                                             min(4, len(t)), 1.0)


class TestIsdRecover:
    def test_round_zero_matches_plain_bp(self):
        a = gaussian_matrix(20, 40, 8)
        b = a @ sparse_signal(40, 3, seed=8)
        plain = solve_truncated_l1(a, b, TruncationSet.full(40),
                                   LpBall(2.0, 0.0), FAST)
        # a rule that detects nothing keeps T = full and exits after round 0
        isd = isd_recover(a, b, 1.0, LpBall(2.0, 0.0), FAST,
                          threshold_rule=TopJ((0,)))
        assert np.allclose(isd.solution, plain.solution, atol=1e-9)
        assert isd.support_history == (TruncationSet.full(40),)

    def test_support_fixpoint_terminates(self):
        a = gaussian_matrix(32, 64, 9)
        x0 = sparse_signal(64, 4, tq_decay_power(), seed=9)
        b = a @ x0
        rep = isd_recover(a, b, 1.0, LpBall(2.0, 0.0), FAST,
                          threshold_rule=FirstJump())
        assert 1 <= len(rep.support_history) <= SolverConfig().isd_max_rounds
        assert np.linalg.norm(rep.solution - x0) <= 1e-5

    def test_isd_at_least_matches_bp(self):
        # decaying signals, tight measurement budget
        m, n, k = 28, 80, 8
        isd_wins = bp_wins = 0
        cfg = SolverConfig(max_iterations=4000, tolerance=1e-8)
        for seed in range(20):
            a = gaussian_matrix(m, n, seed)
            x0 = sparse_signal(n, k, tq_decay_power(), seed=seed + 300)
            b = a @ x0
            nrm = np.linalg.norm(x0)
            bp = solve_truncated_l1(a, b, TruncationSet.full(n),
                                    LpBall(2.0, 0.0), cfg)
            isd = isd_recover(a, b, 1.0, LpBall(2.0, 0.0), cfg,
                              threshold_rule=FirstJump())
            bp_wins += np.linalg.norm(bp.solution - x0) <= 1e-4 * nrm
            isd_wins += np.linalg.norm(isd.solution - x0) <= 1e-4 * nrm
        assert isd_wins >= bp_wins

    def test_topj_schedule(self):
        a = gaussian_matrix(24, 48, 10)
        x0 = sparse_signal(48, 5, tq_decay_power(), seed=10)
        b = a @ x0
        rep = isd_recover(a, b, 1.0, LpBall(2.0, 0.0), FAST,
                          threshold_rule=TopJ((2, 4, 5)))
        assert len(rep.support_history) >= 2


def tq_decay_power():
    from truncq.harness import Power

    return Power(3.0)
