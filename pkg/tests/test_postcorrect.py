"""Tests for prompt construction, reply parsing, and the correction flows."""

import base64
import json
import logging

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

import inkcode.postcorrect as postcorrect
from inkcode.postcorrect import (
    COT_TEMPLATE,
    MULTIMODAL_TEMPLATE,
    SIMPLE_TEMPLATE,
    ChatClientError,
    ChatTurn,
    CorrectionFailedError,
    CorrectionKind,
    CorrectionStrategy,
    EchoChatClient,
    HttpChatClient,
    NoCodeBlockError,
    ScriptedChatClient,
    build_simple_prompt,
    extract_code_block,
    load_template,
    run_correction,
    run_cot_correction,
    run_multimodal,
    run_simple_correction,
)

SAMPLE = "def add(a, b):\n    return a + b"


def fenced(code, tag="python"):
    return f"```{tag}\n{code}\n```"


class TestLoadTemplate:
    def test_simple_sections(self):
        sections = load_template(SIMPLE_TEMPLATE)
        assert set(sections) == {"system", "user"}
        assert sections["user"].count("{code}") == 1

    def test_cot_sections(self):
        sections = load_template(COT_TEMPLATE)
        assert set(sections) == {"system", "step1", "step2", "step3"}
        assert sections["step1"].count("{code}") == 1
        assert "{code}" not in sections["step2"]
        assert "{code}" not in sections["step3"]

    def test_multimodal_sections(self):
        sections = load_template(MULTIMODAL_TEMPLATE)
        assert set(sections) == {"user"}
        assert "{code}" not in sections["user"]

    def test_content_before_first_section_rejected(self, monkeypatch, tmp_path):
        root = tmp_path / "inkcode" / "templates"
        root.mkdir(parents=True)
        (root / "stray_v9.txt").write_text(
            "orphan line\n=== user ===\nbody\n", encoding="utf-8"
        )

        class FakeFiles:
            def joinpath(self, part):
                return FakePath(tmp_path / "inkcode" / part)

        class FakePath:
            def __init__(self, path):
                self._path = path

            def joinpath(self, part):
                return FakePath(self._path / part)

            def read_text(self, encoding="utf-8"):
                return self._path.read_text(encoding=encoding)

        monkeypatch.setattr(
            postcorrect.importlib.resources, "files", lambda package: FakeFiles()
        )
        # Unique name per test run: results are memoized by file name.
        with pytest.raises(ValueError, match="before the first section"):
            load_template("stray_v9.txt")


class TestBuildSimplePrompt:
    def test_roles_and_payload(self):
        turns = build_simple_prompt(SAMPLE)
        assert [t.role for t in turns] == ["system", "user"]
        assert SAMPLE in turns[1].content

    def test_strict_rules_present(self):
        user = build_simple_prompt(SAMPLE)[1].content
        assert "*VERY STRICT RULE*" in user
        assert "Do not fix any logical, or numerical error of the original code." in user
        assert "Do not fix any indentation of the original code." in user
        assert user.count("fenced code block") == 1

    def test_braces_in_code_survive(self):
        code = 'table = {"x": 1}\nprint(f"{table}")'
        user = build_simple_prompt(code)[1].content
        assert code in user

    def test_empty_code_rejected(self):
        with pytest.raises(ValueError):
            build_simple_prompt("")


class TestExtractCodeBlock:
    def test_plain_block(self):
        assert extract_code_block(f"Sure.\n{fenced('x = 1')}\nDone.") == "x = 1"

    def test_language_tag_optional(self):
        assert extract_code_block("```\ny = 2\n```") == "y = 2"

    def test_inner_blank_lines_kept(self):
        code = "a = 1\n\n\nb = 2"
        assert extract_code_block(fenced(code)) == code

    def test_first_of_multiple_blocks_wins(self, caplog):
        reply = fenced("first") + "\n\n" + fenced("second")
        with caplog.at_level(logging.WARNING, logger="inkcode.postcorrect"):
            assert extract_code_block(reply) == "first"
        assert "2 fenced blocks" in caplog.text

    def test_unclosed_fence_not_a_block(self):
        with pytest.raises(NoCodeBlockError):
            extract_code_block("```python\nx = 1")

    def test_no_block(self):
        with pytest.raises(NoCodeBlockError):
            extract_code_block("I could not read the image, sorry.")

    @given(
        st.text(
            alphabet=st.characters(blacklist_characters="`", blacklist_categories=("Cs",)),
            min_size=1,
        ).filter(lambda s: s.strip() and "\n" not in s)
    )
    def test_round_trip_single_line(self, code):
        assert extract_code_block(fenced(code)) == code


class TestEchoClient:
    def test_simple_is_identity(self):
        assert run_simple_correction(SAMPLE, EchoChatClient()) == SAMPLE

    def test_cot_is_identity(self):
        assert run_cot_correction(SAMPLE, EchoChatClient()) == SAMPLE

    def test_echo_without_code(self):
        reply = EchoChatClient().complete(
            [ChatTurn(role="user", content="hello")], model_id="m"
        )
        with pytest.raises(NoCodeBlockError):
            extract_code_block(reply)


class TestCotFlow:
    def test_three_calls_with_growing_context(self):
        client = ScriptedChatClient(
            [fenced("draft one"), "no block here, just chatter", fenced("final version")]
        )
        result = run_cot_correction(SAMPLE, client)
        assert result == "final version"
        assert len(client.calls) == 3
        # system + user, then +assistant +user, then again.
        assert [len(turns) for turns, _, _ in client.calls] == [2, 4, 6]

    def test_step_instructions(self):
        client = ScriptedChatClient([fenced("a"), fenced("b"), fenced("c")])
        run_cot_correction(SAMPLE, client)
        first_user = client.calls[0][0][1].content
        second_user = client.calls[1][0][3].content
        third_user = client.calls[2][0][5].content
        assert SAMPLE in first_user
        assert "undo any logical error corrections made inadvertently" in second_user
        assert "Maintain the original code's indentation." in third_user
        assert "Correct only OCR-related errors." in third_user

    def test_model_settings_forwarded(self):
        client = ScriptedChatClient([fenced("a"), fenced("b"), fenced("c")])
        run_cot_correction(SAMPLE, client, model_id="gpt-test", temperature=0.3)
        assert all(model == "gpt-test" for _, model, _ in client.calls)
        assert all(temp == 0.3 for _, _, temp in client.calls)

    def test_failure_reports_step(self):
        client = ScriptedChatClient([fenced("only one reply")])
        with pytest.raises(CorrectionFailedError) as excinfo:
            run_cot_correction(SAMPLE, client)
        assert excinfo.value.step == 2
        assert isinstance(excinfo.value.cause, ChatClientError)

    def test_empty_code_rejected(self):
        with pytest.raises(ValueError):
            run_cot_correction("", EchoChatClient())


class TestSimpleFlow:
    def test_failure_reports_step_one(self):
        class Broken:
            supports_images = False

            def complete(self, turns, *, model_id, temperature):
                raise ChatClientError("backend down")

        with pytest.raises(CorrectionFailedError) as excinfo:
            run_simple_correction(SAMPLE, Broken())
        assert excinfo.value.step == 1

    def test_reply_without_block_surfaces(self):
        client = ScriptedChatClient(["looks fine to me"])
        with pytest.raises(NoCodeBlockError):
            run_simple_correction(SAMPLE, client)


class TestMultimodalFlow:
    def test_image_turn_and_extraction(self):
        client = ScriptedChatClient([fenced("print('hi')")], supports_images=True)
        result = run_multimodal(b"jpegbytes", client, media_type="image/jpeg")
        assert result == "print('hi')"
        (turns, _, _), = client.calls
        assert len(turns) == 1
        assert turns[0].role == "user"
        assert turns[0].image == b"jpegbytes"
        assert turns[0].image_media_type == "image/jpeg"
        assert "KEEP THE LOGIC EXACTLY AS IT IS" in turns[0].content
        assert "KEEP THE INDENTATION EXACTLY AS IT IS" in turns[0].content

    def test_text_only_client_rejected(self):
        client = ScriptedChatClient([fenced("x")], supports_images=False)
        with pytest.raises(ValueError, match="image-capable"):
            run_multimodal(b"img", client)

    def test_empty_image_rejected(self):
        with pytest.raises(ValueError):
            run_multimodal(b"", ScriptedChatClient([], supports_images=True))


class TestRunCorrection:
    def test_none_is_identity(self):
        strategy = CorrectionStrategy(kind=CorrectionKind.NONE)
        assert run_correction(strategy, None, code=SAMPLE) == SAMPLE
        assert run_correction(strategy, None, code="") == ""

    def test_none_needs_code(self):
        with pytest.raises(ValueError):
            run_correction(CorrectionStrategy(kind=CorrectionKind.NONE), None, code=None)

    @pytest.mark.parametrize(
        "kind", [CorrectionKind.SIMPLE, CorrectionKind.CHAIN_OF_THOUGHT]
    )
    def test_text_strategies_need_client(self, kind):
        with pytest.raises(ValueError, match="chat client"):
            run_correction(CorrectionStrategy(kind=kind), None, code=SAMPLE)

    def test_multimodal_needs_image(self):
        strategy = CorrectionStrategy(kind=CorrectionKind.MULTIMODAL_END_TO_END)
        client = ScriptedChatClient([fenced("x")], supports_images=True)
        with pytest.raises(ValueError, match="image"):
            run_correction(strategy, client, code=SAMPLE, image=None)

    def test_dispatches_simple(self):
        strategy = CorrectionStrategy(kind=CorrectionKind.SIMPLE)
        assert run_correction(strategy, EchoChatClient(), code=SAMPLE) == SAMPLE


class TestChatTurn:
    def test_rejects_unknown_role(self):
        with pytest.raises(ValueError):
            ChatTurn(role="tool", content="x")

    def test_rejects_empty_turn(self):
        with pytest.raises(ValueError):
            ChatTurn(role="user", content="")

    def test_rejects_image_on_assistant(self):
        with pytest.raises(ValueError):
            ChatTurn(role="assistant", content="x", image=b"i", image_media_type="image/png")

    def test_rejects_image_without_media_type(self):
        with pytest.raises(ValueError):
            ChatTurn(role="user", content="x", image=b"i")

    def test_image_only_user_turn_allowed(self):
        turn = ChatTurn(role="user", content="", image=b"i", image_media_type="image/png")
        assert turn.image == b"i"


class TestScriptedClient:
    def test_from_file(self, tmp_path):
        path = tmp_path / "script.json"
        path.write_text(json.dumps([fenced("x = 1")]), encoding="utf-8")
        client = ScriptedChatClient.from_file(path)
        assert client.complete([ChatTurn(role="user", content="go")], model_id="m") == fenced(
            "x = 1"
        )

    def test_from_file_rejects_non_list(self, tmp_path):
        path = tmp_path / "script.json"
        path.write_text('{"reply": "x"}', encoding="utf-8")
        with pytest.raises(ValueError):
            ScriptedChatClient.from_file(path)

    def test_exhaustion(self):
        client = ScriptedChatClient([])
        with pytest.raises(ChatClientError, match="exhausted"):
            client.complete([ChatTurn(role="user", content="go")], model_id="m")


class TestHttpChatClient:
    ENV = "CHAT_API_KEY"

    @pytest.fixture(autouse=True)
    def credential(self, monkeypatch):
        monkeypatch.setenv(self.ENV, "sk-test")

    def make_client(self, handler, **kwargs):
        return HttpChatClient(
            "https://chat.example/v1/completions",
            self.ENV,
            transport=httpx.MockTransport(handler),
            **kwargs,
        )

    @staticmethod
    def ok_response(content):
        return httpx.Response(
            200, json={"choices": [{"message": {"content": content}}]}
        )

    def test_payload_shape_and_auth(self):
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("Authorization")
            seen["payload"] = json.loads(request.content)
            return self.ok_response("ok")

        client = self.make_client(handler)
        reply = client.complete(
            [
                ChatTurn(role="system", content="be careful"),
                ChatTurn(role="user", content="fix this"),
            ],
            model_id="gpt-test",
            temperature=0.2,
        )
        assert reply == "ok"
        assert seen["auth"] == "Bearer sk-test"
        assert seen["payload"]["model"] == "gpt-test"
        assert seen["payload"]["temperature"] == 0.2
        assert seen["payload"]["messages"] == [
            {"role": "system", "content": "be careful"},
            {"role": "user", "content": "fix this"},
        ]

    def test_image_turn_becomes_data_url(self):
        seen = {}

        def handler(request):
            seen["payload"] = json.loads(request.content)
            return self.ok_response("ok")

        client = self.make_client(handler, supports_images=True)
        client.complete(
            [
                ChatTurn(
                    role="user",
                    content="transcribe",
                    image=b"imgbytes",
                    image_media_type="image/png",
                )
            ],
            model_id="m",
        )
        parts = seen["payload"]["messages"][0]["content"]
        assert parts[0] == {"type": "text", "text": "transcribe"}
        url = parts[1]["image_url"]["url"]
        prefix = "data:image/png;base64,"
        assert url.startswith(prefix)
        assert base64.b64decode(url[len(prefix):]) == b"imgbytes"

    def test_server_error(self):
        def handler(request):
            return httpx.Response(500, text="overloaded")

        with pytest.raises(ChatClientError, match="500"):
            self.make_client(handler).complete(
                [ChatTurn(role="user", content="x")], model_id="m"
            )

    def test_malformed_body(self):
        def handler(request):
            return httpx.Response(200, json={"unexpected": True})

        with pytest.raises(ChatClientError, match="malformed"):
            self.make_client(handler).complete(
                [ChatTurn(role="user", content="x")], model_id="m"
            )

    def test_missing_credential(self, monkeypatch):
        monkeypatch.delenv(self.ENV, raising=False)

        def handler(request):  # pragma: no cover - never reached
            raise AssertionError("must not send without a key")

        with pytest.raises(ChatClientError, match=self.ENV):
            self.make_client(handler).complete(
                [ChatTurn(role="user", content="x")], model_id="m"
            )

    def test_rejects_bad_in_flight_cap(self):
        with pytest.raises(ValueError):
            HttpChatClient("https://chat.example", self.ENV, max_in_flight=0)
