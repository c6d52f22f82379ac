"""Emotion harness: masking, prompts, confidence parsing, Acc@k scoring,
all over committed mock fixtures with zero network activity."""

from pathlib import Path

import pytest

from mgclr.emotion import (
    AlignmentError,
    ChatClient,
    DialogueTranscript,
    InferenceResult,
    MGEventLog,
    MockTransportError,
    ParseError,
    build_inference_prompt,
    load_mg_log,
    load_transcript,
    mask_transcript,
    parse_confidences,
    run_inference,
    score_accuracy,
)
from mgclr.emotion.prompts import (
    INFERENCE_PROMPT,
    MASKING_PROMPT,
    MatchRecord,
    build_priorcheck_prompts,
)
from mgclr.emotion.vocab import DEFAULT_MG_VOCABULARY, full_vocabulary

FIXTURES = Path(__file__).parent / "fixtures" / "emotion"


@pytest.fixture()
def client(monkeypatch):
    """Mock client that trips the test if anything touches the network."""

    def _no_network(*args, **kwargs):
        raise AssertionError("network call attempted in mock mode")

    import requests

    monkeypatch.setattr(requests, "post", _no_network)
    monkeypatch.setattr(requests, "get", _no_network)
    return ChatClient(mock=True, fixture_dir=FIXTURES)


def transcript(vid="v001"):
    return load_transcript(FIXTURES / f"transcript_{vid}.json")


def mg_log(vid="v001"):
    return load_mg_log(FIXTURES / f"mg_{vid}.json")


class TestTranscriptTypes:
    def test_load_transcript(self):
        t = transcript()
        assert t.video_id == "v001"
        assert len(t) == 3
        assert t.entries[0][1] == "reporter"

    def test_timestamps_must_be_ordered(self):
        with pytest.raises(ValueError, match="non-decreasing"):
            DialogueTranscript(video_id="x", entries=((5.0, "player", "a"), (1.0, "player", "b")))

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            DialogueTranscript(video_id="x", entries=((1.0, "player", "  "),))

    def test_mg_log_vocabulary_enforced(self):
        with pytest.raises(ValueError, match="unknown micro-gesture"):
            MGEventLog(video_id="x", ground_truth="win", events=((1.0, "Moonwalking"),))

    def test_mg_log_ground_truth(self):
        with pytest.raises(ValueError, match="win"):
            MGEventLog(video_id="x", ground_truth="draw")

    def test_vocabulary_size(self):
        assert len(DEFAULT_MG_VOCABULARY) == 31
        assert len(full_vocabulary()) == 32


class TestMasking:
    def test_empty_transcript_rejected_before_any_call(self, client):
        empty = DialogueTranscript(video_id="v001", entries=())
        with pytest.raises(ValueError, match="empty"):
            mask_transcript(empty, client)
        assert client.network_calls == 0

    def test_three_row_fixture_aligned(self, client):
        masked = mask_transcript(transcript(), client)
        assert len(masked) == 3
        assert masked.entries[0][0] == 1.0
        assert "[MASK]" in masked.entries[0][1]
        assert client.network_calls == 0

    def test_malformed_row_is_parse_error(self, client):
        t = transcript()
        response = (FIXTURES / "mask_bad_row.txt").read_text()
        from mgclr.emotion import parse_masked_table

        with pytest.raises(ParseError) as err:
            parse_masked_table(response, t)
        assert err.value.raw  # raw response attached for debugging

    def test_row_count_mismatch_is_alignment_error(self, client):
        t = transcript()
        response = (FIXTURES / "mask_missing_row.txt").read_text()
        from mgclr.emotion import parse_masked_table

        with pytest.raises(AlignmentError, match="2 rows"):
            parse_masked_table(response, t)

    def test_masking_prompt_sent_verbatim(self, client, monkeypatch):
        sent = {}
        original = client.complete

        def spy(prompt, tag):
            sent["prompt"] = prompt
            return original(prompt, tag)

        monkeypatch.setattr(client, "complete", spy)
        mask_transcript(transcript(), client)
        assert sent["prompt"].startswith(MASKING_PROMPT)
        assert "Congratulations" in sent["prompt"]

    def test_missing_fixture_raises(self, client):
        t = DialogueTranscript(video_id="vXXX", entries=((0.0, "player", "hi"),))
        with pytest.raises(MockTransportError, match="vXXX"):
            mask_transcript(t, client)


class TestInferencePrompt:
    def test_absent_mg_no_json_block(self, client):
        masked = mask_transcript(transcript(), client)
        prompt = build_inference_prompt(masked, None)
        assert "Micro-gestures (JSON)" not in prompt
        assert prompt.startswith(INFERENCE_PROMPT)

    def test_contains_sum_rule_verbatim(self, client):
        masked = mask_transcript(transcript(), client)
        prompt = build_inference_prompt(masked, mg_log())
        assert "ensure that the sum of the confidence levels is 100" in prompt

    def test_golden_prompt_bytes(self, client):
        masked = mask_transcript(transcript(), client)
        prompt = build_inference_prompt(masked, mg_log())
        golden_path = FIXTURES / "golden_inference_prompt_v001.txt"
        assert prompt == golden_path.read_text()

    def test_byte_stable(self, client):
        masked = mask_transcript(transcript(), client)
        assert build_inference_prompt(masked, mg_log()) == build_inference_prompt(
            masked, mg_log()
        )


class TestParseConfidences:
    def test_worked_example(self):
        result = parse_confidences(
            "text-only: win: 70, lose: 30. text+micro-gestures: win: 40, lose: 60."
        )
        assert result.text_only == (70, 30)
        assert result.text_mg == (40, 60)

    def test_sum_violation(self):
        with pytest.raises(ParseError, match="sum != 100"):
            parse_confidences((FIXTURES / "infer_bad_sum.txt").read_text())

    def test_missing_block(self):
        with pytest.raises(ParseError, match="text_mg"):
            parse_confidences((FIXTURES / "infer_bad_missing.txt").read_text())

    def test_non_integer_scores(self):
        with pytest.raises(ParseError, match="non-integer"):
            parse_confidences((FIXTURES / "infer_bad_float.txt").read_text())

    def test_boundary_100_0(self):
        result = parse_confidences(
            "text-only: win: 100, lose: 0. text+micro-gestures: win: 100, lose: 0."
        )
        assert result.text_only == (100, 0)
        assert result.prediction("text_only") == "win"

    def test_case_and_whitespace_tolerant(self):
        result = parse_confidences(
            "Text-Only:  WIN: 55 ,  LOSE: 45 .\nTEXT + MICRO-GESTURES: win:45, lose:55."
        )
        assert result.text_only == (55, 45)
        assert result.text_mg == (45, 55)

    def test_render_round_trip(self):
        for pairs in (((70, 30), (40, 60)), ((100, 0), (0, 100)), ((50, 50), (51, 49))):
            original = InferenceResult(text_only=pairs[0], text_mg=pairs[1])
            assert parse_confidences(original.render()) == original

    def test_tie_counts_incorrect(self):
        result = InferenceResult(text_only=(50, 50), text_mg=(60, 40))
        assert result.prediction("text_only") is None
        assert result.prediction("text_mg") == "win"


class TestScoring:
    @staticmethod
    def fixture_results(client):
        out = {}
        for vid in ("v001", "v002"):
            masked = mask_transcript(transcript(vid), client)
            out[vid] = run_inference(masked, mg_log(vid), client, runs=5)
        return out

    def test_fixture_acc_at_k(self, client):
        results = self.fixture_results(client)
        truth = {"v001": "win", "v002": "lose"}
        expected = {
            1: {"text_only": 50.0, "text_mg": 100.0},
            3: {"text_only": 50.0, "text_mg": 100.0},
            5: {"text_only": 40.0, "text_mg": 80.0},
        }
        for k, want in expected.items():
            got = score_accuracy(results, truth, k)
            assert got["text_only"] == pytest.approx(want["text_only"], abs=1e-12)
            assert got["text_mg"] == pytest.approx(want["text_mg"], abs=1e-12)
        assert client.network_calls == 0

    def test_all_correct_is_100(self):
        result = InferenceResult(text_only=(90, 10), text_mg=(80, 20))
        results = {"a": [result] * 3, "b": [result] * 3}
        truth = {"a": "win", "b": "win"}
        for k in (1, 2, 3):
            scores = score_accuracy(results, truth, k)
            assert scores == {"text_only": 100.0, "text_mg": 100.0}

    def test_two_videos_one_correct_half(self):
        win = InferenceResult(text_only=(90, 10), text_mg=(90, 10))
        results = {"a": [win], "b": [win]}
        truth = {"a": "win", "b": "lose"}
        assert score_accuracy(results, truth, 1)["text_only"] == 50.0

    def test_permutation_invariance(self, client):
        results = self.fixture_results(client)
        truth = {"v001": "win", "v002": "lose"}
        a = score_accuracy(results, truth, 5)
        swapped = {k: results[k] for k in reversed(sorted(results))}
        assert score_accuracy(swapped, truth, 5) == a

    def test_monotone_under_fixing_a_wrong_run(self):
        wrong = InferenceResult(text_only=(10, 90), text_mg=(10, 90))
        right = InferenceResult(text_only=(90, 10), text_mg=(90, 10))
        truth = {"a": "win"}
        base = score_accuracy({"a": [wrong, wrong]}, truth, 2)
        fixed = score_accuracy({"a": [wrong, right]}, truth, 2)
        assert fixed["text_only"] > base["text_only"]

    def test_insufficient_runs(self):
        result = InferenceResult(text_only=(90, 10), text_mg=(80, 20))
        with pytest.raises(ValueError, match="runs"):
            score_accuracy({"a": [result]}, {"a": "win"}, 2)


class TestPriorCheckPrompts:
    def test_label_prompt_contains_label(self):
        prompts = build_priorcheck_prompts(["Covering face"])
        assert prompts == ["What emotion do you think the Covering face below represents?"]

    def test_match_prompt_two_option_block(self):
        record = MatchRecord(draw="Women's Singles", round=1, year=2019,
                             tournament="Australian Open", player_1="A. Player",
                             player_2="B. Player")
        (prompt,) = build_priorcheck_prompts([record])
        assert prompt.endswith("A. A. Player; B. B. Player")
        assert "who is the winner?" in prompt

    def test_empty_input_empty_list(self):
        assert build_priorcheck_prompts([]) == []

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            build_priorcheck_prompts(["Backflipping"])
