import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aifgames.beliefs import FactorBelief
from aifgames.genmodel import (
    COLUMN_MASS_CAP,
    RESET_CONCENTRATION,
    GenerativeModel,
    TransitionBuffer,
    TransitionModel,
    bayesian_model_reduction,
    learn_update,
    normalized_matrix,
    predict_counts,
)


def delta_evidence_oracle(prior_col, post_col, alpha_r):
    """Independent evidence difference using plain python math."""
    total = sum(prior_col)
    p = [c / total for c in prior_col]
    scaled = [c / alpha_r for c in prior_col]
    m = max(scaled)
    ex = [math.exp(s - m) for s in scaled]
    z = sum(ex)
    p_red = [e / z for e in ex]
    w_total = sum(post_col)
    w = [c / w_total for c in post_col]
    return math.log(sum(wi * ri / pi for wi, ri, pi in zip(w, p_red, p)))


class TestTransitionModel:
    def test_uniform_init(self):
        m = TransitionModel.uniform(2, 3)
        assert m.counts.shape == (2, 3, 2, 2)
        assert np.all(m.counts == 1.0)

    def test_rejects_nonpositive(self):
        bad = np.ones((2, 1, 2, 2))
        bad[0, 0, 0, 0] = 0.0
        with pytest.raises(ValueError):
            TransitionModel(bad)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            TransitionModel(np.ones((2, 2, 2)))

    def test_normalized_matrix_columns(self):
        m = TransitionModel.uniform(2, 1)
        m.counts[0, 0] = np.array([[3.0, 1.0], [1.0, 1.0]])
        out = normalized_matrix(m, 0, 0)
        np.testing.assert_allclose(out.sum(axis=0), [1.0, 1.0])
        np.testing.assert_allclose(out[:, 0], [0.75, 0.25])


class TestLearnUpdate:
    def buffer(self, pairs):
        buf = TransitionBuffer()
        for means, action in pairs:
            buf.append(np.array(means, dtype=float), action)
        return buf

    def test_one_hot_transition(self):
        model = TransitionModel.uniform(2, 1)
        buf = self.buffer([([[1.0, 0.0]], 0), ([[1.0, 0.0]], 1)])
        out = learn_update(model, buf, alpha_l=1.0)
        # one c->c transition under ego action c
        assert out.counts[0, 0, 0, 0] == 2.0
        assert out.counts[0, 0].sum() == 5.0
        # the slice for the other ego action is untouched
        np.testing.assert_array_equal(out.counts[1, 0], np.ones((2, 2)))

    def test_zero_rate_is_identity(self):
        model = TransitionModel.uniform(2, 2)
        buf = self.buffer([([[0.5, 0.5], [0.2, 0.8]], 0), ([[1.0, 0.0], [0.0, 1.0]], 0)])
        out = learn_update(model, buf, alpha_l=0.0)
        np.testing.assert_array_equal(out.counts, model.counts)

    def test_added_mass_accounting(self):
        model = TransitionModel.uniform(2, 1)
        buf = self.buffer(
            [([[0.7, 0.3]], 0), ([[0.4, 0.6]], 0), ([[0.9, 0.1]], 1), ([[0.5, 0.5]], 0)]
        )
        out = learn_update(model, buf, alpha_l=0.5, column_mass_cap=None)
        added = out.counts.sum() - model.counts.sum()
        assert added == pytest.approx(0.5 * 3, abs=1e-12)

    def test_soft_means_outer_product(self):
        model = TransitionModel.uniform(2, 1)
        buf = self.buffer([([[0.6, 0.4]], 1), ([[0.9, 0.1]], 0)])
        out = learn_update(model, buf, alpha_l=1.0, column_mass_cap=None)
        np.testing.assert_allclose(
            out.counts[1, 0], np.ones((2, 2)) + np.outer([0.9, 0.1], [0.6, 0.4])
        )

    def test_never_decreases_counts(self):
        model = TransitionModel.uniform(2, 2)
        buf = self.buffer([([[0.5, 0.5], [0.5, 0.5]], 0), ([[0.5, 0.5], [0.5, 0.5]], 1)])
        out = learn_update(model, buf, alpha_l=1.0, column_mass_cap=None)
        assert np.all(out.counts >= model.counts)

    def test_requires_two_entries(self):
        model = TransitionModel.uniform(2, 1)
        with pytest.raises(ValueError):
            learn_update(model, self.buffer([([[1.0, 0.0]], 0)]), alpha_l=1.0)

    def test_column_mass_cap(self):
        model = TransitionModel.uniform(2, 1)
        model.counts[0, 0, :, 0] = [40.0, 10.0]
        buf = self.buffer([([[1.0, 0.0]], 0), ([[1.0, 0.0]], 0)])
        out = learn_update(model, buf, alpha_l=1.0, column_mass_cap=10.0)
        col = out.counts[0, 0, :, 0]
        assert col.sum() == pytest.approx(10.0, abs=1e-12)
        # proportions of the over-cap column are preserved
        np.testing.assert_allclose(col / col.sum(), [41.0 / 51.0, 10.0 / 51.0])
        # columns under the cap are left alone
        assert out.counts[0, 0, :, 1].sum() == pytest.approx(2.0)

    def test_default_cap_active(self):
        model = TransitionModel.uniform(2, 1)
        model.counts[0, 0, :, 0] = [COLUMN_MASS_CAP * 3, COLUMN_MASS_CAP]
        buf = self.buffer([([[1.0, 0.0]], 0), ([[1.0, 0.0]], 0)])
        out = learn_update(model, buf, alpha_l=1.0)
        assert out.counts[0, 0, :, 0].sum() == pytest.approx(COLUMN_MASS_CAP)


class TestPredictCounts:
    def test_one_hot_example(self):
        model = TransitionModel.uniform(2, 1)
        out = predict_counts(
            model, 0, 0, np.array([1.0, 0.0]), np.array([1.0, 0.0]), alpha_l=1.0
        )
        np.testing.assert_array_equal(out, [[2.0, 1.0], [1.0, 1.0]])

    def test_zero_rate(self):
        model = TransitionModel.uniform(2, 1)
        out = predict_counts(
            model, 1, 0, np.array([0.5, 0.5]), np.array([0.3, 0.7]), alpha_l=0.0
        )
        np.testing.assert_array_equal(out, np.ones((2, 2)))

    def test_pure_function(self):
        model = TransitionModel.uniform(2, 1)
        before = model.counts.copy()
        predict_counts(model, 0, 0, np.array([0.5, 0.5]), np.array([0.5, 0.5]), 1.0)
        np.testing.assert_array_equal(model.counts, before)


class TestBayesianModelReduction:
    def test_zero_case_keeps_posterior(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            counts = rng.uniform(0.2, 8.0, (2, 2, 2, 2))
            model = TransitionModel(counts)
            out = bayesian_model_reduction(model, model.copy())
            np.testing.assert_array_equal(out.counts, counts)

    def test_delta_evidence_matches_oracle(self):
        # accepting column: posterior sharpened toward the softmax favourite
        prior_col = [2.0, 1.0]
        post_col = [4.0, 0.1]
        de = delta_evidence_oracle(prior_col, post_col, alpha_r=1.25)
        assert de > 0
        model = TransitionModel.uniform(2, 1)
        model.counts[0, 0, :, 0] = prior_col
        posterior = model.copy()
        posterior.counts[0, 0, :, 0] = post_col
        scaled = np.array(prior_col) / 1.25
        ex = np.exp(scaled - scaled.max())
        reduced = ex / ex.sum()
        out = bayesian_model_reduction(model, posterior, alpha_r=1.25)
        np.testing.assert_allclose(
            out.counts[0, 0, :, 0], RESET_CONCENTRATION * reduced, atol=1e-12
        )
        out = bayesian_model_reduction(model, posterior, alpha_r=1.25, restore="mass")
        np.testing.assert_allclose(
            out.counts[0, 0, :, 0], sum(post_col) * reduced, atol=1e-12
        )

    def test_rejecting_column_keeps_posterior(self):
        # posterior moved against the reduction: evidence difference negative
        prior_col = [2.0, 1.0]
        post_col = [2.0, 3.0]
        assert delta_evidence_oracle(prior_col, post_col, alpha_r=1.25) < 0
        model = TransitionModel.uniform(2, 1)
        model.counts[0, 0, :, 0] = prior_col
        posterior = model.copy()
        posterior.counts[0, 0, :, 0] = post_col
        out = bayesian_model_reduction(model, posterior, alpha_r=1.25)
        np.testing.assert_array_equal(out.counts[0, 0, :, 0], post_col)

    def test_mass_restore_preserves_column_totals(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            model = TransitionModel(rng.uniform(0.2, 9.0, (2, 1, 2, 2)))
            posterior = TransitionModel(model.counts + rng.uniform(0.0, 3.0, model.counts.shape))
            out = bayesian_model_reduction(model, posterior, restore="mass")
            np.testing.assert_allclose(
                out.counts.sum(axis=2), posterior.counts.sum(axis=2), atol=1e-9
            )
            assert np.all(out.counts > 0)

    def test_reset_restore_fixed_mass(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            model = TransitionModel(rng.uniform(0.2, 9.0, (2, 1, 2, 2)))
            posterior = TransitionModel(model.counts + rng.uniform(0.0, 3.0, model.counts.shape))
            out = bayesian_model_reduction(model, posterior, restore="reset")
            totals = out.counts.sum(axis=2)
            post_totals = posterior.counts.sum(axis=2)
            # every column either kept its posterior counts or was reset to
            # the reduced probabilities at the fixed total concentration
            assert np.all(
                (np.abs(totals - post_totals) < 1e-9)
                | (np.abs(totals - RESET_CONCENTRATION) < 1e-9)
            )
            assert np.all(out.counts > 0)

    def test_reset_concentration_override(self):
        model = TransitionModel.uniform(2, 1)
        model.counts[0, 0, :, 0] = [2.0, 1.0]
        posterior = model.copy()
        posterior.counts[0, 0, :, 0] = [4.0, 0.1]
        out = bayesian_model_reduction(model, posterior, reset_concentration=2.5)
        assert out.counts[0, 0, :, 0].sum() == pytest.approx(2.5)

    def test_unknown_restore_rejected(self):
        model = TransitionModel.uniform(2, 1)
        with pytest.raises(ValueError):
            bayesian_model_reduction(model, model.copy(), restore="clamp")

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0.1, 20.0), min_size=4, max_size=4))
    def test_zero_case_property(self, flat):
        counts = np.array(flat).reshape(1, 1, 2, 2)
        model = TransitionModel(counts)
        out = bayesian_model_reduction(model, model.copy())
        np.testing.assert_array_equal(out.counts, counts)


class TestGenerativeModel:
    def test_default_shape(self):
        gm = GenerativeModel.default(3)
        assert gm.n_factors == 3
        assert gm.n_actions == 2
        assert len(gm.initial_prior) == 3
        assert all(isinstance(b, FactorBelief) for b in gm.initial_prior)
        np.testing.assert_allclose(gm.habits, [0.5, 0.5])

    def test_habits_must_normalize(self):
        with pytest.raises(ValueError):
            GenerativeModel(
                initial_prior=[FactorBelief(np.ones(2))],
                habits=np.array([0.7, 0.7]),
                transition=TransitionModel.uniform(2, 1),
            )

    def test_interval_bounds_ordered(self):
        with pytest.raises(ValueError):
            GenerativeModel(
                initial_prior=[FactorBelief(np.ones(2))],
                habits=np.array([0.5, 0.5]),
                transition=TransitionModel.uniform(2, 1),
                learn_interval_bounds=(30, 18),
            )


class TestTransitionBuffer:
    def test_chronological_and_clear(self):
        buf = TransitionBuffer()
        buf.append(np.array([[1.0, 0.0]]), 0)
        buf.append(np.array([[0.0, 1.0]]), 1)
        assert len(buf) == 2
        assert buf.entries[0][1] == 0
        assert buf.entries[1][1] == 1
        buf.clear()
        assert len(buf) == 0

    def test_appended_means_are_copies(self):
        buf = TransitionBuffer()
        means = np.array([[0.5, 0.5]])
        buf.append(means, 0)
        means[0, 0] = 0.9
        assert buf.entries[0][0][0, 0] == 0.5
