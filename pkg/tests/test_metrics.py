import pytest
from hypothesis import given
from hypothesis import strategies as st

from inkcode.metrics import (
    EmptyDatasetError,
    EmptyGoldLabelError,
    aggregate_ocr_error,
    canonicalize,
    levenshtein,
    normalized_levenshtein,
)
from oracles import levenshtein_bfs

short_strings = st.text(alphabet="abc", max_size=8)


class TestCanonicalize:
    def test_line_endings_unified(self):
        assert canonicalize("a\r\nb\rc") == "a\nb\nc"

    def test_tabs_become_four_spaces(self):
        assert canonicalize("\tx") == "    x"
        assert canonicalize("a\tb") == "a    b"

    def test_trailing_whitespace_stripped_per_line(self):
        assert canonicalize("a  \nb\t") == "a\nb"

    def test_trailing_blank_lines_dropped(self):
        assert canonicalize("a\n\n\n") == "a"
        assert canonicalize("\n\n") == ""

    def test_interior_blank_lines_kept(self):
        assert canonicalize("a\n\nb") == "a\n\nb"

    def test_idempotent(self):
        text = "def f():\r\n\treturn 1  \n\n"
        assert canonicalize(canonicalize(text)) == canonicalize(text)


class TestLevenshtein:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            ("kitten", "sitting", 3),
            ("", "", 0),
            ("", "abc", 3),
            ("abc", "", 3),
            ("abc", "abc", 0),
            ("flaw", "lawn", 2),
            ("ab", "ba", 2),
        ],
    )
    def test_examples(self, a, b, expected):
        assert levenshtein(a, b) == expected

    @given(short_strings, short_strings)
    def test_matches_bfs_oracle(self, a, b):
        assert levenshtein(a, b) == levenshtein_bfs(a, b)

    @given(short_strings, short_strings)
    def test_symmetric(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)

    @given(short_strings, short_strings)
    def test_bounds(self, a, b):
        d = levenshtein(a, b)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
        assert (d == 0) == (a == b)

    @given(short_strings, short_strings, short_strings)
    def test_triangle_inequality(self, a, b, c):
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)

    def test_unicode_scalars(self):
        # Astral-plane characters count as single symbols.
        assert levenshtein("a\U0001F600b", "ab") == 1


class TestNormalizedLevenshtein:
    def test_kitten_sitting(self):
        assert normalized_levenshtein("kitten", "sitting") == 50.0

    def test_identity_is_zero(self):
        assert normalized_levenshtein("def f():\n    pass", "def f():\n    pass") == 0.0

    def test_canonicalization_applies_to_both_sides(self):
        assert normalized_levenshtein("a\r\n", "a") == 0.0
        assert normalized_levenshtein("\tx", "    x") == 0.0

    def test_not_clipped_above_100(self):
        assert normalized_levenshtein("a", "bbbb") == 400.0

    @pytest.mark.parametrize("gold", ["", "   ", "\n\n", " \t \n  "])
    def test_empty_gold_rejected(self, gold):
        with pytest.raises(EmptyGoldLabelError):
            normalized_levenshtein(gold, "x = 1")


class TestAggregate:
    def test_mean_and_std_error(self):
        score = aggregate_ocr_error([("p1", 10.0), ("p2", 20.0), ("p3", 30.0)])
        assert score.mean == 20.0
        assert score.std_error == pytest.approx(5.773502691896258, rel=1e-12)
        assert score.n == 3
        assert score.per_program == (("p1", 10.0), ("p2", 20.0), ("p3", 30.0))

    def test_single_program_has_no_std_error(self):
        score = aggregate_ocr_error([("p1", 12.5)])
        assert score.mean == 12.5
        assert score.std_error is None
        assert score.n == 1

    def test_empty_rejected(self):
        with pytest.raises(EmptyDatasetError):
            aggregate_ocr_error([])

    @given(st.lists(st.floats(min_value=0.0, max_value=500.0), min_size=2, max_size=20))
    def test_mean_within_range(self, values):
        score = aggregate_ocr_error([(f"p{i}", v) for i, v in enumerate(values)])
        assert min(values) <= score.mean <= max(values)
        assert score.std_error >= 0.0
