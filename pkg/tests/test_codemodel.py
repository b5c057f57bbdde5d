import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from inkcode.codemodel import (
    INDENT_UNIT,
    BoundingBox,
    IndentedLine,
    IndentedProgram,
    LineBox,
    OcrDocument,
    PipelineResult,
    StageTiming,
    normalize_reading_order,
    render_program,
)


def box(x_min=0.0, y_min=0.0, x_max=10.0, y_max=10.0):
    return BoundingBox(x_min=x_min, y_min=y_min, x_max=x_max, y_max=y_max)


class TestBoundingBox:
    def test_dimensions(self):
        b = box(2.0, 3.0, 12.0, 8.0)
        assert b.width == 10.0
        assert b.height == 5.0

    def test_coerces_ints_to_float(self):
        b = BoundingBox(x_min=1, y_min=2, x_max=3, y_max=4)
        assert isinstance(b.x_min, float)
        assert b.x_max == 3.0

    @pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf, -math.inf])
    def test_rejects_bad_coordinates(self, bad):
        with pytest.raises(ValueError):
            BoundingBox(x_min=bad, y_min=0.0, x_max=10.0, y_max=10.0)

    def test_rejects_inverted_extents(self):
        with pytest.raises(ValueError, match="x_min"):
            BoundingBox(x_min=5.0, y_min=0.0, x_max=1.0, y_max=10.0)
        with pytest.raises(ValueError, match="y_min"):
            BoundingBox(x_min=0.0, y_min=9.0, x_max=1.0, y_max=2.0)

    def test_zero_area_allowed(self):
        b = BoundingBox(x_min=5.0, y_min=5.0, x_max=5.0, y_max=5.0)
        assert b.width == 0.0 and b.height == 0.0

    def test_json_round_trip(self):
        b = box(1.5, 2.5, 3.5, 4.5)
        assert BoundingBox.from_json_dict(b.to_json_dict()) == b

    def test_json_missing_field(self):
        with pytest.raises(ValueError, match="x_max"):
            BoundingBox.from_json_dict({"x_min": 0, "y_min": 0, "y_max": 1})


class TestLineBox:
    def test_empty_text_allowed(self):
        assert LineBox(text="", box=box()).text == ""

    def test_rejects_non_string_text(self):
        with pytest.raises(ValueError, match="string"):
            LineBox(text=None, box=box())


class TestOcrDocument:
    def make(self, **overrides):
        fields = dict(
            lines=(LineBox(text="x = 1", box=box()),),
            image_width=100.0,
            image_height=200.0,
            provider_id="test",
        )
        fields.update(overrides)
        return OcrDocument(**fields)

    def test_rejects_non_positive_dimensions(self):
        with pytest.raises(ValueError, match="image_width"):
            self.make(image_width=0.0)
        with pytest.raises(ValueError, match="image_height"):
            self.make(image_height=-5.0)

    def test_rejects_empty_provider(self):
        with pytest.raises(ValueError, match="provider_id"):
            self.make(provider_id="")

    def test_lines_coerced_to_tuple(self):
        doc = self.make(lines=[LineBox(text="a", box=box())])
        assert isinstance(doc.lines, tuple)

    def test_canonical_json_round_trips_to_identical_bytes(self):
        doc = self.make()
        text = doc.to_canonical_json()
        assert text.endswith("\n")
        again = OcrDocument.from_json(text)
        assert again == doc
        assert again.to_canonical_json() == text

    def test_from_json_rejects_non_object(self):
        with pytest.raises(ValueError, match="object"):
            OcrDocument.from_json("[1, 2]")


class TestNormalizeReadingOrder:
    def test_sorts_by_y_then_x(self):
        lines = (
            LineBox(text="third", box=box(0, 50, 10, 60)),
            LineBox(text="second", box=box(90, 10, 99, 20)),
            LineBox(text="first", box=box(5, 10, 15, 20)),
        )
        doc = OcrDocument(lines=lines, image_width=100, image_height=100, provider_id="p")
        ordered = normalize_reading_order(doc)
        assert [line.text for line in ordered.lines] == ["first", "second", "third"]

    def test_stable_for_equal_keys(self):
        lines = (
            LineBox(text="a", box=box(5, 10, 15, 20)),
            LineBox(text="b", box=box(5, 10, 15, 20)),
        )
        doc = OcrDocument(lines=lines, image_width=100, image_height=100, provider_id="p")
        assert [line.text for line in normalize_reading_order(doc).lines] == ["a", "b"]

    def test_whitespace_only_text_becomes_empty(self):
        lines = (
            LineBox(text="   \t ", box=box(0, 0, 10, 10)),
            LineBox(text="  x ", box=box(0, 20, 10, 30)),
        )
        doc = OcrDocument(lines=lines, image_width=100, image_height=100, provider_id="p")
        cleaned = normalize_reading_order(doc)
        assert cleaned.lines[0].text == ""
        # Text with any visible character passes through untouched.
        assert cleaned.lines[1].text == "  x "


class TestIndentedProgram:
    def test_level_validation(self):
        with pytest.raises(ValueError):
            IndentedLine(text="x", level=-1)
        with pytest.raises(ValueError):
            IndentedLine(text="x", level=1.0)
        with pytest.raises(ValueError):
            IndentedLine(text="x", level=True)

    def test_pairs_round_trip(self):
        pairs = [("def f():", 0), ("return 1", 1)]
        assert IndentedProgram.from_pairs(pairs).as_pairs() == pairs

    def test_json_round_trip(self):
        program = IndentedProgram.from_pairs([("a", 0), ("b", 2)])
        assert IndentedProgram.from_json_dict(program.to_json_dict()) == program

    @pytest.mark.parametrize(
        "levels,ok",
        [
            ([], True),
            ([0], True),
            ([0, 1, 2, 0, 1], True),
            ([0, 2], False),       # jump of two
            ([1], False),          # first line indented
            ([0, 1, 3], False),
            ([0, 3, 0], False),
        ],
    )
    def test_follows_nesting_rules(self, levels, ok):
        program = IndentedProgram.from_pairs([(f"l{i}", lv) for i, lv in enumerate(levels)])
        assert program.follows_nesting_rules() is ok


class TestRenderProgram:
    def test_examples(self):
        assert render_program(IndentedProgram(lines=())) == ""
        program = IndentedProgram.from_pairs([("def f():", 0), ("return 1", 1)])
        assert render_program(program) == "def f():\n    return 1"

    def test_no_trailing_newline(self):
        program = IndentedProgram.from_pairs([("pass", 0)])
        assert not render_program(program).endswith("\n")

    def test_custom_indent_unit(self):
        program = IndentedProgram.from_pairs([("a", 2)])
        assert render_program(program, indent_unit="\t") == "\t\ta"

    def test_empty_indent_unit_rejected(self):
        with pytest.raises(ValueError, match="indent_unit"):
            render_program(IndentedProgram(lines=()), indent_unit="")

    @given(
        st.lists(
            st.tuples(
                st.text(
                    alphabet=st.characters(min_codepoint=33, max_codepoint=126),
                    min_size=1,
                    max_size=12,
                ),
                st.integers(min_value=0, max_value=5),
            ),
            max_size=10,
        )
    )
    def test_render_parse_round_trip(self, pairs):
        # Texts start with a visible character, so the indent prefix is
        # unambiguous and the rendering can be parsed back exactly.
        program = IndentedProgram.from_pairs(pairs)
        rendered = render_program(program)
        if not pairs:
            assert rendered == ""
            return
        parsed = []
        for line in rendered.split("\n"):
            stripped = line.lstrip(" ")
            level = (len(line) - len(stripped)) // len(INDENT_UNIT)
            parsed.append((stripped, level))
        assert parsed == pairs


class TestPipelineResult:
    def test_json_round_trip(self):
        doc = OcrDocument(
            lines=(LineBox(text="x = 1", box=box()),),
            image_width=100.0,
            image_height=50.0,
            provider_id="test",
        )
        result = PipelineResult(
            raw_ocr=doc,
            indented=IndentedProgram.from_pairs([("x = 1", 0)]),
            corrected_code="x = 1",
            config_id="cfg",
            stage_timings=(StageTiming("ocr", 0.25), StageTiming("indent", 0.5)),
        )
        again = PipelineResult.from_json_dict(json.loads(json.dumps(result.to_json_dict())))
        assert again == result
