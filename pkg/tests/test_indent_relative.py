import math
import statistics

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import make_doc
from inkcode.indent_relative import (
    DEFAULT_GMM_PARAMS,
    GmmParams,
    IndentLabel,
    InsufficientLabelsError,
    InvertedClassesError,
    classify_delta,
    compute_deltas,
    fit_gmm_mle,
    relative_indent,
)


class TestComputeDeltas:
    def test_normalized_differences(self):
        doc = make_doc([0, 80, 85, 0], width=1000.0)
        assert compute_deltas(doc) == [0.08, 0.005, -0.085]

    def test_single_line_has_no_deltas(self):
        assert compute_deltas(make_doc([50])) == []

    @given(
        st.lists(st.integers(min_value=0, max_value=999), min_size=2, max_size=10),
        st.sampled_from([500.0, 1000.0, 2000.0]),
    )
    def test_width_normalization(self, xs, width):
        doc = make_doc(xs, width=width)
        deltas = compute_deltas(doc)
        assert len(deltas) == len(xs) - 1
        for d, (a, b) in zip(deltas, zip(xs, xs[1:])):
            assert d == (b - a) / width


class TestGmmParams:
    def test_validation(self):
        with pytest.raises(ValueError, match="sigmas"):
            GmmParams(0.007, 0.0, 0.078, 0.025)
        with pytest.raises(ValueError, match="tau"):
            GmmParams(0.007, 0.008, 0.078, 0.025, tau=1.0)
        with pytest.raises(ValueError, match="mu_indent"):
            GmmParams(0.08, 0.008, 0.007, 0.025)

    def test_json_round_trip(self):
        params = GmmParams(0.01, 0.005, 0.09, 0.02, tau=0.4)
        assert GmmParams.from_json(params.to_json()) == params

    def test_missing_field(self):
        with pytest.raises(ValueError, match="mu_indent"):
            GmmParams.from_json_dict({"mu_no_indent": 0.0, "sigma_no_indent": 1.0})


class TestClassifyDelta:
    def test_jitter_sized_delta_is_not_an_indent(self):
        posterior = classify_delta(0.007, DEFAULT_GMM_PARAMS)
        assert posterior == pytest.approx(0.0057, abs=1e-3)
        assert posterior < 0.5

    def test_indent_sized_delta(self):
        assert classify_delta(0.078, DEFAULT_GMM_PARAMS) > 0.999

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            classify_delta(-0.01, DEFAULT_GMM_PARAMS)

    def test_decision_boundary_location(self):
        # The posterior crosses 0.5 a little below 0.03 page widths.
        assert classify_delta(0.02, DEFAULT_GMM_PARAMS) < 0.5
        assert classify_delta(0.035, DEFAULT_GMM_PARAMS) > 0.5

    def test_tau_weighting(self):
        # A stronger indent prior moves the same delta toward indent.
        skewed = GmmParams(0.007, 0.008, 0.078, 0.025, tau=0.9)
        assert classify_delta(0.02, skewed) > classify_delta(0.02, DEFAULT_GMM_PARAMS)


class TestFitGmmMle:
    def test_population_std_fit(self):
        labeled = [
            (0.06, IndentLabel.INDENT),
            (0.10, IndentLabel.INDENT),
            (0.00, IndentLabel.NO_INDENT),
            (0.02, IndentLabel.NO_INDENT),
        ]
        params = fit_gmm_mle(labeled)
        assert params.mu_indent == 0.08
        assert params.mu_no_indent == 0.01
        assert params.sigma_no_indent == 0.01
        assert params.sigma_indent == statistics.pstdev([0.06, 0.10])
        assert abs(params.sigma_indent - 0.02) <= math.ulp(0.02)
        assert params.tau == 0.5

    def test_insufficient_labels(self):
        with pytest.raises(InsufficientLabelsError):
            fit_gmm_mle([(0.06, IndentLabel.INDENT), (0.0, IndentLabel.NO_INDENT), (0.01, IndentLabel.NO_INDENT)])

    def test_inverted_classes(self):
        labeled = [
            (0.001, IndentLabel.INDENT),
            (0.002, IndentLabel.INDENT),
            (0.08, IndentLabel.NO_INDENT),
            (0.09, IndentLabel.NO_INDENT),
        ]
        with pytest.raises(InvertedClassesError):
            fit_gmm_mle(labeled)

    def test_sigma_floor_on_identical_samples(self):
        labeled = [
            (0.08, IndentLabel.INDENT),
            (0.08, IndentLabel.INDENT),
            (0.0, IndentLabel.NO_INDENT),
            (0.0, IndentLabel.NO_INDENT),
        ]
        params = fit_gmm_mle(labeled)
        assert params.sigma_indent == 1e-6
        assert params.sigma_no_indent == 1e-6

    @given(
        st.lists(st.floats(min_value=0.0, max_value=0.012), min_size=2, max_size=10),
        st.lists(st.floats(min_value=0.05, max_value=0.12), min_size=2, max_size=10),
    )
    def test_fit_then_classify_separates_training_clusters(self, no_indent, indent):
        labeled = [(d, IndentLabel.NO_INDENT) for d in no_indent] + [
            (d, IndentLabel.INDENT) for d in indent
        ]
        params = fit_gmm_mle(labeled)
        assert params.mu_no_indent < params.mu_indent
        assert classify_delta(max(no_indent), params) <= classify_delta(min(indent), params)


class TestRelativeIndent:
    def test_indent_then_jitter_then_dedent(self):
        doc = make_doc([0, 80, 85, 0], width=1000.0)
        program = relative_indent(doc)
        assert [line.level for line in program.lines] == [0, 1, 1, 0]

    def test_two_indents_then_partial_dedent(self):
        doc = make_doc([0, 80, 160, 84], width=1000.0)
        program = relative_indent(doc)
        assert [line.level for line in program.lines] == [0, 1, 2, 1]

    def test_empty_document(self):
        assert relative_indent(make_doc([])).lines == ()

    def test_single_line(self):
        assert [line.level for line in relative_indent(make_doc([700])).lines] == [0]

    def test_zero_delta_keeps_level_without_classifier(self):
        doc = make_doc([40, 40, 40], width=1000.0)
        assert [line.level for line in relative_indent(doc).lines] == [0, 0, 0]

    def test_dedent_tie_prefers_outer_level(self):
        # Recorded levels: 0 at x=0, 1 at x=80. A dedent to x=40 is 40 away
        # from both; the tie goes to the smaller level.
        doc = make_doc([0, 80, 40], width=1000.0)
        assert [line.level for line in relative_indent(doc).lines] == [0, 1, 0]

    def test_dedent_levels_resolve_by_nearest_recorded_x(self):
        doc = make_doc([0, 80, 160, 240, 78], width=1000.0)
        assert [line.level for line in relative_indent(doc).lines] == [0, 1, 2, 3, 1]

    def test_texts_preserved(self):
        doc = make_doc([0, 80], texts=["while True:", "pass"], width=1000.0)
        assert [line.text for line in relative_indent(doc).lines] == ["while True:", "pass"]

    @given(st.lists(st.integers(min_value=0, max_value=999), min_size=1, max_size=12))
    def test_levels_never_jump_more_than_one(self, xs):
        program = relative_indent(make_doc(xs, width=1000.0))
        assert program.follows_nesting_rules()

    @given(
        st.lists(st.integers(min_value=0, max_value=499), min_size=1, max_size=10),
        st.sampled_from([2.0, 4.0]),
    )
    def test_scale_invariance(self, xs, factor):
        # Scaling x positions and page width together leaves levels unchanged.
        base = relative_indent(make_doc(xs, width=500.0))
        scaled = relative_indent(make_doc([x * factor for x in xs], width=500.0 * factor))
        assert [l.level for l in scaled.lines] == [l.level for l in base.lines]
