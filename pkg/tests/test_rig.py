"""
Rig evaluation, controller gradients, offset matrices and model restriction
Run with: pytest tests/test_rig.py -v
"""

import numpy as np
import pydantic
import pytest

from rigsolve.core.exceptions import DimensionError, ValidationError
from rigsolve.domain.rig import controller_gradient, delta_matrix, evaluate_rig, offset_matrix, restrict_model
from rigsolve.models.rig import BlendshapeModel, CorrectiveTerm, vertex_rows
from tests.helpers import random_model


def brute_force_rig(model: BlendshapeModel, w) -> np.ndarray:
    mesh = model.neutral.copy()
    for i in range(model.m):
        mesh += w[i] * model.basis[:, i]
    for term in model.correctives:
        mesh += np.prod([w[i] for i in term.ids]) * term.offset
    return mesh


# ==================== MODEL VALIDATION ====================

class TestModelValidation:
    """Shape and corrective checks at construction"""

    def test_rejects_wrong_neutral_length(self):
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel(n=2, m=1, neutral=np.zeros(5), basis=np.zeros((6, 1)))

    def test_rejects_wrong_basis_shape(self):
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel(n=1, m=2, neutral=np.zeros(3), basis=np.zeros((3, 3)))

    def test_rejects_unsorted_corrective_ids(self):
        with pytest.raises(pydantic.ValidationError):
            CorrectiveTerm(ids=(1, 0), offset=np.zeros(3))

    def test_rejects_single_controller_corrective(self):
        with pytest.raises(pydantic.ValidationError):
            CorrectiveTerm(ids=(0,), offset=np.zeros(3))

    def test_rejects_out_of_range_corrective(self):
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel(
                n=1, m=2, neutral=np.zeros(3), basis=np.zeros((3, 2)),
                correctives=[CorrectiveTerm(ids=(1, 2), offset=np.zeros(3))],
            )

    def test_rejects_negative_corrective_id(self):
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel(
                n=1, m=2, neutral=np.zeros(3), basis=np.zeros((3, 2)),
                correctives=[{"ids": [-1, 1], "offset": np.zeros(3)}],
            )

    def test_out_of_range_corrective_from_plain_dict(self):
        doc = {"n": 1, "m": 2, "neutral": [0.0] * 3, "basis": np.zeros((3, 2)),
               "correctives": [{"ids": [0, 5], "offset": [0.0] * 3}]}
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel.model_validate(doc)

    @pytest.mark.parametrize("n,m", [(0, 1), (1, 0), (0, 0)])
    def test_rejects_empty_rig(self, n, m):
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel(n=n, m=m, neutral=np.zeros(3 * n), basis=np.zeros((3 * n, m)))

    def test_rejects_duplicate_corrective(self):
        term = CorrectiveTerm(ids=(0, 1), offset=np.ones(3))
        with pytest.raises(pydantic.ValidationError):
            BlendshapeModel(n=1, m=2, neutral=np.zeros(3), basis=np.zeros((3, 2)), correctives=[term, term])

    def test_corrective_counts(self, tiny_model):
        assert tiny_model.corrective_counts() == {2: 1, 3: 0, 4: 0}

    def test_vertex_rows_layout(self):
        assert vertex_rows([0, 2]).tolist() == [0, 1, 2, 6, 7, 8]


# ==================== EVALUATE RIG ====================

class TestEvaluateRig:
    """f(w) = b0 + Bw + corrective products"""

    def test_zero_weights_give_neutral(self, rng):
        model = random_model(rng, n=5, m=4, n_correctives=3)
        np.testing.assert_array_equal(evaluate_rig(model, np.zeros(4)), model.neutral)

    def test_full_activation(self, tiny_model):
        np.testing.assert_allclose(evaluate_rig(tiny_model, [1.0, 1.0]), [1.0, 1.0, 1.0])

    def test_half_activation(self, tiny_model):
        np.testing.assert_allclose(evaluate_rig(tiny_model, [0.5, 0.5]), [0.5, 0.5, 0.25])

    def test_matches_term_by_term_expansion(self, rng):
        model = random_model(rng, n=6, m=5, n_correctives=6)
        for _ in range(5):
            w = rng.uniform(size=5)
            np.testing.assert_allclose(evaluate_rig(model, w), brute_force_rig(model, w), atol=1e-12)

    def test_quad_corrective(self):
        model = BlendshapeModel(
            n=1, m=4, neutral=np.zeros(3), basis=np.zeros((3, 4)),
            correctives=[CorrectiveTerm(ids=(0, 1, 2, 3), offset=[1.0, 0.0, 0.0])],
        )
        np.testing.assert_allclose(evaluate_rig(model, [0.5, 0.5, 0.5, 0.5]), [0.0625, 0.0, 0.0])

    def test_linear_model_is_affine(self, rng):
        model = random_model(rng, n=4, m=3)
        w = rng.uniform(size=3)
        np.testing.assert_allclose(evaluate_rig(model, w), model.neutral + model.basis @ w, atol=1e-12)

    def test_dimension_mismatch(self, tiny_model):
        with pytest.raises(DimensionError):
            evaluate_rig(tiny_model, [0.1, 0.2, 0.3])


# ==================== CONTROLLER GRADIENT ====================

class TestControllerGradient:
    """f(w) = c + w_i g with c = f(w with w_i = 0)"""

    def test_partner_zero_kills_corrective(self, tiny_model):
        np.testing.assert_allclose(controller_gradient(tiny_model, [0.7, 0.0], 0), [1.0, 0.0, 0.0])

    def test_partner_one_adds_corrective(self, tiny_model):
        np.testing.assert_allclose(controller_gradient(tiny_model, [0.3, 1.0], 0), [1.0, 0.0, 1.0])

    def test_other_weights_zero_give_column(self, rng):
        model = random_model(rng, n=4, m=4, n_correctives=4)
        w = np.zeros(4)
        w[2] = 0.8
        np.testing.assert_allclose(controller_gradient(model, w, 2), model.basis[:, 2])

    def test_multilinearity(self, rng):
        model = random_model(rng, n=5, m=4, n_correctives=5)
        w = rng.uniform(size=4)
        for i in range(4):
            g = controller_gradient(model, w, i)
            base = w.copy()
            base[i] = 0.0
            c = evaluate_rig(model, base)
            for t in (0.0, 0.5, 1.0):
                moved = w.copy()
                moved[i] = t
                np.testing.assert_allclose(evaluate_rig(model, moved), c + t * g, atol=1e-12)

    def test_index_out_of_range(self, tiny_model):
        with pytest.raises(DimensionError):
            controller_gradient(tiny_model, [0.0, 0.0], 2)


# ==================== OFFSET MATRICES ====================

class TestOffsetMatrices:
    """D (squared per-vertex norms) and the rearranged basis Delta"""

    def test_squared_norm(self):
        model = BlendshapeModel(n=1, m=1, neutral=np.zeros(3), basis=np.array([[1.0], [2.0], [2.0]]))
        assert offset_matrix(model)[0, 0] == pytest.approx(9.0)

    def test_zero_column(self, rng):
        model = random_model(rng, n=4, m=3)
        basis = model.basis.copy()
        basis[:, 1] = 0.0
        zeroed = BlendshapeModel(n=4, m=3, neutral=model.neutral, basis=basis)
        assert np.all(offset_matrix(zeroed)[:, 1] == 0.0)

    def test_scaling_is_quadratic(self, rng):
        model = random_model(rng, n=4, m=2)
        scaled = BlendshapeModel(n=4, m=2, neutral=model.neutral, basis=model.basis * np.array([3.0, 1.0]))
        np.testing.assert_allclose(offset_matrix(scaled)[:, 0], 9.0 * offset_matrix(model)[:, 0])

    def test_delta_single_vertex(self):
        model = BlendshapeModel(n=1, m=1, neutral=np.zeros(3), basis=np.array([[1.0], [2.0], [3.0]]))
        np.testing.assert_array_equal(delta_matrix(model), [[1.0, 2.0, 3.0]])

    def test_delta_is_rearrangement(self, rng):
        model = random_model(rng, n=6, m=4)
        delta = delta_matrix(model)
        assert delta.shape == (6, 12)
        assert (delta ** 2).sum() == pytest.approx((model.basis ** 2).sum())

    def test_delta_triples_match_offset_matrix(self, rng):
        model = random_model(rng, n=6, m=4)
        per_controller = (delta_matrix(model) ** 2).reshape(6, 4, 3).sum(axis=2)
        np.testing.assert_allclose(per_controller, offset_matrix(model))

    def test_offset_matrix_ignores_xyz_order(self, rng):
        model = random_model(rng, n=3, m=2)
        perm = np.concatenate([3 * v + np.array([2, 0, 1]) for v in range(3)])
        permuted = BlendshapeModel(n=3, m=2, neutral=model.neutral[perm], basis=model.basis[perm])
        np.testing.assert_allclose(offset_matrix(permuted), offset_matrix(model))


# ==================== RESTRICT MODEL ====================

class TestRestrictModel:
    """Submodels over a vertex / controller subset"""

    def test_full_lists_reproduce_model(self, rng):
        model = random_model(rng, n=4, m=3, n_correctives=2)
        sub = restrict_model(model, range(4), range(3))
        w = rng.uniform(size=3)
        np.testing.assert_allclose(evaluate_rig(sub, w), evaluate_rig(model, w))
        assert sub.dropped_correctives == 0

    def test_straddling_corrective_dropped(self):
        model = BlendshapeModel(
            n=1, m=3, neutral=np.zeros(3), basis=np.eye(3),
            correctives=[CorrectiveTerm(ids=(1, 2), offset=np.ones(3))],
        )
        sub = restrict_model(model, [0], [1])
        assert sub.model.correctives == []
        assert sub.dropped_correctives == 1

    def test_corrective_ids_renumbered(self):
        model = BlendshapeModel(
            n=1, m=4, neutral=np.zeros(3), basis=np.zeros((3, 4)),
            correctives=[CorrectiveTerm(ids=(1, 3), offset=np.ones(3))],
        )
        sub = restrict_model(model, [0], [1, 3])
        assert sub.model.corrective_ids == [(0, 1)]

    def test_evaluate_then_select(self, rng):
        model = random_model(rng, n=6, m=4, n_correctives=4)
        vertices, controllers = [1, 3, 4], [0, 2]
        sub = restrict_model(model, vertices, controllers)
        local = rng.uniform(size=2)
        full = np.zeros(4)
        full[controllers] = local
        # correctives that straddle have a zero partner weight here
        np.testing.assert_allclose(evaluate_rig(sub, local), evaluate_rig(model, full)[vertex_rows(vertices)], atol=1e-12)

    def test_rejects_unsorted_indices(self, tiny_model):
        with pytest.raises(ValidationError):
            restrict_model(tiny_model, [0], [1, 0])

    def test_rejects_out_of_range(self, tiny_model):
        with pytest.raises(DimensionError):
            restrict_model(tiny_model, [0, 1], [0])

    @pytest.mark.parametrize("vertices,controllers", [([], [0]), ([0], [])])
    def test_rejects_empty_restriction(self, tiny_model, vertices, controllers):
        with pytest.raises(ValidationError):
            restrict_model(tiny_model, vertices, controllers)
