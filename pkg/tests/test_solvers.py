"""
Coordinate updates, holistic CD, naive clustered solving and consensus ADMM
Run with: pytest tests/test_solvers.py -v
"""

import numpy as np
import pytest

from rigsolve.core.exceptions import ValidationError
from rigsolve.domain.clustering import build_clustering
from rigsolve.domain.coordinate import GramSystem, coordinate_descent, coordinate_update, gram_descent
from rigsolve.domain.metrics import cardinality
from rigsolve.domain.rig import evaluate_rig, restrict_model
from rigsolve.domain.solvers import (
    admm_solve,
    build_subproblems,
    holistic_objective,
    index_map,
    multiplicity_matrix,
    solve_cd,
    solve_naive_clustered,
)
from rigsolve.models.clustering import Clustering
from rigsolve.models.rig import BlendshapeModel
from tests.helpers import block_model, full, random_model


def one_dof_model() -> BlendshapeModel:
    return BlendshapeModel(n=1, m=1, neutral=np.zeros(3), basis=np.array([[1.0], [0.0], [0.0]]))


def overlap_problem():
    """
    Two clusters sharing controller 1. Cluster 0 sees only w0 + w1, so it cannot
    pin w1 down alone; cluster 1 sees w1 and w2 directly.
    """
    basis = np.zeros((6, 3))
    basis[0, 0] = 1.0
    basis[0, 1] = 1.0
    basis[5, 1] = 1.0
    basis[4, 2] = 1.0
    model = BlendshapeModel(n=2, m=3, neutral=np.zeros(6), basis=basis)
    truth = np.array([0.2, 0.6, 0.3])
    clustering = Clustering(K=2, mesh_clusters=[[0], [1]], ctrl_clusters=[[0, 1], [1, 2]])
    return model, clustering, truth, evaluate_rig(model, truth)


# ==================== COORDINATE UPDATE ====================

class TestCoordinateUpdate:
    """Closed-form clamped minimiser of the 1-D objective"""

    def test_unconstrained(self):
        assert coordinate_update(one_dof_model(), np.array([0.5, 0.0, 0.0]), np.zeros(1), 0, 0.0) == pytest.approx(0.5)

    def test_sparsity_shift(self):
        assert coordinate_update(one_dof_model(), np.array([0.5, 0.0, 0.0]), np.zeros(1), 0, 0.25) == pytest.approx(0.25)

    def test_clamped_above(self):
        assert coordinate_update(one_dof_model(), np.array([2.0, 0.0, 0.0]), np.zeros(1), 0, 0.0) == 1.0

    def test_clamped_below(self):
        assert coordinate_update(one_dof_model(), np.array([-1.0, 0.0, 0.0]), np.zeros(1), 0, 0.0) == 0.0

    def test_prox_pulls_toward_anchor(self):
        # (0 - 0 + 1 * 1) / (1 + 1)
        t = coordinate_update(one_dof_model(), np.zeros(3), np.zeros(1), 0, 0.0, prox=(1.0, 1.0))
        assert t == pytest.approx(0.5)

    def test_inert_coordinate(self):
        model = BlendshapeModel(n=1, m=1, neutral=np.zeros(3), basis=np.zeros((3, 1)))
        assert coordinate_update(model, np.ones(3), np.zeros(1), 0, 0.0) == 0.0

    def test_matches_grid_search(self, rng):
        grid = np.linspace(0.0, 1.0, 10001)
        for _ in range(500):
            n, m = int(rng.integers(1, 31)), int(rng.integers(1, 7))
            model = random_model(rng, n, m, n_correctives=int(rng.integers(0, m)))
            sub = restrict_model(model, range(n), range(m))
            w = rng.uniform(size=m)
            i = int(rng.integers(m))
            target = rng.normal(size=3 * n)
            alpha = float(rng.uniform(0.0, 2.0))
            prox = (float(rng.uniform(0.0, 2.0)), float(rng.uniform(-0.5, 1.5))) if rng.uniform() < 0.5 else None

            lo, hi = w.copy(), w.copy()
            lo[i], hi[i] = 0.0, 1.0
            c = evaluate_rig(model, lo)
            g = evaluate_rig(model, hi) - c
            r0 = c - target
            values = 0.5 * (r0 @ r0 + 2.0 * grid * (g @ r0) + grid ** 2 * (g @ g)) + alpha * grid
            if prox is not None:
                values += 0.5 * prox[0] * (grid - prox[1]) ** 2

            t = coordinate_update(sub, target, w, i, alpha, prox=prox)
            assert abs(t - grid[np.argmin(values)]) <= 1e-3


# ==================== HOLISTIC ====================

class TestSolveCD:
    """Coordinate descent on the full rig"""

    def test_neutral_target_gives_zero(self, small_data, config):
        model = small_data[0]
        result = solve_cd(model, model.neutral, config.model_copy(update={"alpha": 0.5}))
        np.testing.assert_array_equal(result.w, np.zeros(model.m))
        assert result.converged

    def test_orthogonal_columns_recover_truth(self, config):
        model = block_model(n_per_block=3, blocks=3)
        truth = np.array([0.3, 0.0, 0.8])
        result = solve_cd(model, evaluate_rig(model, truth), config)
        np.testing.assert_allclose(result.w, truth, atol=1e-6)

    def test_objective_never_increases(self, small_data, config):
        model, _, targets = small_data
        cfg = config.model_copy(update={"alpha": 0.1})
        rng = np.random.default_rng(3)
        for _ in range(50):
            target = targets[int(rng.integers(len(targets)))] + 0.05 * rng.normal(size=targets.shape[1])
            values = []
            solve_cd(model, target, cfg, on_update=lambda i, obj: values.append(obj))
            assert all(b <= a + 1e-12 * max(1.0, abs(a)) for a, b in zip(values, values[1:]))

    def test_trace_matches_objective(self, small_data, config):
        model, _, targets = small_data
        cfg = config.model_copy(update={"alpha": 0.2})
        result = solve_cd(model, targets[3], cfg)
        assert result.objective_trace[-1] == pytest.approx(holistic_objective(model, result.w, targets[3], 0.2))

    def test_outputs_feasible(self, small_data, config):
        model, _, targets = small_data
        for target in targets:
            w = solve_cd(model, target, config).w
            assert np.all((w >= 0.0) & (w <= 1.0))

    def test_large_alpha_zeroes_everything(self, small_data, config):
        model, _, targets = small_data
        w = solve_cd(model, targets[5], config.model_copy(update={"alpha": 1e6})).w
        assert cardinality(w, 1e-6) == 0

    def test_cardinality_falls_with_alpha(self, small_data, config):
        model, _, targets = small_data
        medians = []
        for alpha in (0.0, 5.0):
            cards = [cardinality(solve_cd(model, t, config.model_copy(update={"alpha": alpha})).w, 1e-6) for t in targets]
            medians.append(np.median(cards))
        assert medians[1] <= medians[0]

    def test_randomized_order_is_reproducible(self, small_data, config):
        model, _, targets = small_data
        cfg = config.model_copy(update={"randomize_order": True, "seed": 5})
        np.testing.assert_array_equal(solve_cd(model, targets[2], cfg).w, solve_cd(model, targets[2], cfg).w)


# ==================== GRAM FORM ====================

class TestGramDescent:
    """Sweeps on precomputed inner products take the residual-carrying steps"""

    def test_matches_residual_sweeps(self, rng):
        for _ in range(30):
            n, m = int(rng.integers(2, 25)), int(rng.integers(1, 7))
            model = random_model(rng, n, m, n_correctives=int(rng.integers(0, m)))
            target = rng.normal(size=3 * n)
            w0 = rng.uniform(size=m)
            alpha = float(rng.uniform(0.0, 1.0))
            prox = (float(rng.uniform(0.1, 3.0)), rng.uniform(size=m)) if rng.uniform() < 0.5 else None

            system = GramSystem(model)
            fast = gram_descent(system, system.project(target), w0, alpha, max_sweeps=15, tol=0.0, prox=prox)
            slow = coordinate_descent(model, target, w0, alpha, max_sweeps=15, tol=0.0, prox=prox)
            np.testing.assert_allclose(fast.w, slow.w, atol=1e-9)
            np.testing.assert_allclose(fast.trace, slow.trace, rtol=1e-8, atol=1e-8)
            assert fast.fit == pytest.approx(0.5 * float(slow.residual @ slow.residual), rel=1e-8, abs=1e-8)

    def test_corrective_controller_steps(self, tiny_model):
        # the pair corrective makes controller 0's gradient depend on w1
        target = np.array([0.5, 1.0, 0.5])
        system = GramSystem(tiny_model)
        outcome = gram_descent(system, system.project(target), np.zeros(2), 0.0, max_sweeps=200, tol=1e-12)
        np.testing.assert_allclose(outcome.w, [0.5, 1.0], atol=1e-6)
        assert outcome.fit == pytest.approx(0.0, abs=1e-10)

    def test_gram_matches_augmented_basis(self, rng):
        model = random_model(rng, 5, 4, n_correctives=3)
        system = GramSystem(model)
        A = np.hstack([model.basis, model.corrective_offsets.T])
        np.testing.assert_allclose(system.gram, A.T @ A, atol=1e-10)
        w = rng.uniform(size=4)
        np.testing.assert_allclose(model.neutral + A @ system.coefficients(w), evaluate_rig(model, w), atol=1e-12)

    def test_subproblems_carry_their_own_system(self, small_data):
        model = small_data[0]
        clustering = build_clustering(model, "rsjd_a", k=3, seed=0)
        for sp in build_subproblems(model, clustering):
            assert sp.system.m == sp.controllers.size
            assert sp.system.gram.shape[0] == sp.controllers.size + len(sp.sub.model.corrective_ids)


# ==================== BOOKKEEPING ====================

class TestBookkeeping:
    """Multiplicity S and the local-to-global map"""

    def test_multiplicity(self):
        clustering = Clustering(K=2, mesh_clusters=[[0], [1]], ctrl_clusters=[[0, 1], [1, 2]])
        assert multiplicity_matrix(clustering, 3).diag.tolist() == [1, 2, 1]

    def test_unassigned_controller(self):
        clustering = Clustering(K=2, mesh_clusters=[[0], [1]], ctrl_clusters=[[0], [2]])
        S = multiplicity_matrix(clustering, 4)
        assert S.diag.tolist() == [1, 0, 1, 0]
        assert S.assigned.tolist() == [True, False, True, False]

    def test_counting_identity(self, small_data):
        model = small_data[0]
        clustering = build_clustering(model, "rsjd_a", k=3, seed=0)
        assert multiplicity_matrix(clustering, model.m).diag.sum() == sum(clustering.ctrl_sizes())

    def test_lift_then_restrict(self):
        clustering = Clustering(K=2, mesh_clusters=[[0], [1]], ctrl_clusters=[[0, 2], [1, 2]])
        G = index_map(clustering)
        local = np.array([0.25, 0.75])
        np.testing.assert_array_equal(G.lift(0, local, 3), [0.25, 0.0, 0.75])
        np.testing.assert_array_equal(G.restrict(0, G.lift(0, local, 3)), local)

    def test_empty_clusters_have_no_subproblem(self):
        model = block_model(n_per_block=2, blocks=2)
        clustering = Clustering(K=2, mesh_clusters=[[0, 1], [2, 3]], ctrl_clusters=[[0], []])
        assert [sp.k for sp in build_subproblems(model, clustering)] == [0]


# ==================== NAIVE CLUSTERED ====================

class TestNaiveClustered:
    """Independent subproblems, averaged where they overlap"""

    def test_single_cluster_equals_holistic(self, small_data, config):
        model, _, targets = small_data
        cfg = config.model_copy(update={"alpha": 0.1})
        naive = solve_naive_clustered(model, full(model.n, model.m), targets[4], cfg)
        holistic = solve_cd(model, targets[4], cfg)
        np.testing.assert_allclose(naive.w, holistic.w, atol=1e-9)

    def test_shared_controller_is_averaged(self, config):
        basis = np.zeros((6, 1))
        basis[0, 0] = basis[3, 0] = 1.0
        model = BlendshapeModel(n=2, m=1, neutral=np.zeros(6), basis=basis)
        clustering = Clustering(K=2, mesh_clusters=[[0], [1]], ctrl_clusters=[[0], [0]])
        result = solve_naive_clustered(model, clustering, np.array([0.4, 0, 0, 0.6, 0, 0]), config)
        assert [float(x[0]) for x in result.local_estimates] == pytest.approx([0.4, 0.6])
        assert result.w[0] == pytest.approx(0.5)

    def test_disjoint_blocks_equal_holistic(self, config):
        model = block_model(n_per_block=3, blocks=2)
        target = evaluate_rig(model, [0.7, 0.2])
        clustering = Clustering(K=2, mesh_clusters=[[0, 1, 2], [3, 4, 5]], ctrl_clusters=[[0], [1]])
        np.testing.assert_allclose(solve_naive_clustered(model, clustering, target, config).w, solve_cd(model, target, config).w)

    def test_unassigned_controller_is_zero(self, config):
        model = block_model(n_per_block=2, blocks=2)
        clustering = Clustering(K=2, mesh_clusters=[[0, 1], [2, 3]], ctrl_clusters=[[0], []])
        w = solve_naive_clustered(model, clustering, evaluate_rig(model, [0.5, 0.9]), config).w
        assert w[1] == 0.0
        assert w[0] == pytest.approx(0.5)

    def test_overlap_leaves_local_estimates_apart(self, config):
        model, clustering, _, target = overlap_problem()
        result = solve_naive_clustered(model, clustering, target, config)
        first, second = result.local_estimates
        assert first[1] == pytest.approx(0.0)
        assert second[0] == pytest.approx(0.6)


# ==================== CONSENSUS ADMM ====================

class TestADMM:
    """General-form consensus with the sparsity term on z"""

    def test_rejects_non_positive_rho(self, tiny_model, config):
        with pytest.raises(ValidationError):
            admm_solve(tiny_model, full(1, 2), np.zeros(3), config.model_copy(update={"rho": 0.0}))

    def test_neutral_target_gives_zero(self, small_data, config):
        model = small_data[0]
        clustering = build_clustering(model, "rsjd_a", k=3, seed=0)
        result = admm_solve(model, clustering, model.neutral, config.model_copy(update={"alpha": 0.3}))
        np.testing.assert_array_equal(result.w, np.zeros(model.m))
        assert result.converged

    def test_single_cluster_matches_holistic(self, rng, config):
        cfg = config.model_copy(update={"admm_iters": 100, "admm_tol": 1e-9, "cd_iters": 500, "cd_tol": 1e-10})
        for _ in range(20):
            n, m = int(rng.integers(20, 61)), int(rng.integers(2, 9))
            model = random_model(rng, n, m)
            target = evaluate_rig(model, rng.uniform(size=m) * (rng.uniform(size=m) < 0.6)) + 0.05 * rng.normal(size=3 * n)
            w_admm = admm_solve(model, full(n, m), target, cfg).w
            w_cd = solve_cd(model, target, cfg).w
            assert np.abs(w_admm - w_cd).max() <= 1e-3

    def test_single_cluster_matches_holistic_with_sparsity(self, rng, config):
        # alpha sits on z alone, so the single block needs a longer run to settle
        cfg = config.model_copy(update={"admm_iters": 1500, "admm_tol": 1e-9, "cd_iters": 500, "cd_tol": 1e-10})
        for _ in range(5):
            n, m = int(rng.integers(20, 61)), int(rng.integers(2, 9))
            model = random_model(rng, n, m)
            target = evaluate_rig(model, rng.uniform(size=m) * (rng.uniform(size=m) < 0.6)) + 0.05 * rng.normal(size=3 * n)
            run = cfg.model_copy(update={"alpha": float(rng.uniform(0.0, 1.0))})
            w_admm = admm_solve(model, full(n, m), target, run).w
            w_cd = solve_cd(model, target, run).w
            assert np.abs(w_admm - w_cd).max() <= 1e-3

    def test_overlap_reaches_consensus(self, config):
        model, clustering, truth, target = overlap_problem()
        cfg = config.model_copy(update={"admm_iters": 2000, "admm_tol": 1e-7, "cd_iters": 200, "cd_tol": 1e-12})
        result = admm_solve(model, clustering, target, cfg)
        assert result.converged
        first, second = result.local_estimates
        assert abs(first[1] - second[0]) < 1e-3
        np.testing.assert_allclose(result.w, truth, atol=1e-3)

    def test_converged_residual_below_tolerance(self, small_data, config):
        model, _, targets = small_data
        clustering = build_clustering(model, "rsjd_a", k=3, seed=1)
        cfg = config.model_copy(update={"admm_iters": 300, "alpha": 0.05})
        result = admm_solve(model, clustering, targets[6], cfg)
        assert np.all((result.w >= 0.0) & (result.w <= 1.0))
        if result.converged:
            assert result.state.primal_residuals[-1] < cfg.admm_tol
        for x in result.state.x:
            assert np.all((x >= 0.0) & (x <= 1.0))

    def test_workers_do_not_change_result(self, small_data, config):
        model, _, targets = small_data
        clustering = build_clustering(model, "rsjd_a", k=3, seed=2)
        serial = admm_solve(model, clustering, targets[1], config)
        parallel = admm_solve(model, clustering, targets[1], config.model_copy(update={"workers": 4}))
        np.testing.assert_array_equal(serial.w, parallel.w)
        assert serial.objective_trace == parallel.objective_trace

    def test_inexact_runs_one_sweep(self, small_data, config):
        model, _, targets = small_data
        clustering = build_clustering(model, "rsjd", k=2, seed=0)
        result = admm_solve(model, clustering, targets[0], config.model_copy(update={"inexact": True, "admm_iters": 5}))
        assert result.iterations <= 5
        assert len(result.objective_trace) == result.iterations

    def test_x_update_objective_non_increasing(self, small_data):
        model, _, targets = small_data
        anchor = np.full(model.m, 0.3)
        outcome = coordinate_descent(model, targets[0], np.zeros(model.m), 0.0, max_sweeps=20, tol=0.0, prox=(1.0, anchor))
        assert all(b <= a + 1e-12 * max(1.0, abs(a)) for a, b in zip(outcome.trace, outcome.trace[1:]))
