"""The mask -> prompt -> parse -> score pipeline."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .client import ChatClient
from .prompts import INFERENCE_PROMPT, build_masking_request
from .transcripts import DialogueTranscript, MGEventLog


class ParseError(ValueError):
    """Model response does not follow the required structure."""

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class AlignmentError(ParseError):
    """Masked rows do not line up with the transcript entries."""


@dataclass(frozen=True)
class MaskedTranscript:
    video_id: str
    entries: tuple  # of (float timestamp, masked text)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class InferenceResult:
    """Win/lose confidence pairs for both analysis modes; each pair
    sums to exactly 100."""

    text_only: tuple  # (win, lose)
    text_mg: tuple    # (win, lose)

    def __post_init__(self):
        for name, (win, lose) in (("text_only", self.text_only), ("text_mg", self.text_mg)):
            if win < 0 or lose < 0 or win + lose != 100:
                raise ValueError(f"{name} confidences must be non-negative and sum to 100")

    def prediction(self, mode: str) -> str | None:
        """'win' or 'lose' by higher confidence; None on a 50/50 tie."""
        win, lose = self.text_only if mode == "text_only" else self.text_mg
        if win == lose:
            return None
        return "win" if win > lose else "lose"

    def render(self) -> str:
        """The exact output format the inference prompt requests."""
        return (
            f"text-only: win: {self.text_only[0]}, lose: {self.text_only[1]}. "
            f"text+micro-gestures: win: {self.text_mg[0]}, lose: {self.text_mg[1]}."
        )


_TABLE_ROW = re.compile(r"^\s*\|(.+)\|\s*$")
_SEPARATOR = re.compile(r"^[\s|:\-]+$")


def parse_masked_table(response: str, transcript: DialogueTranscript) -> MaskedTranscript:
    """Parse the two-column (timestamp | masked text) Markdown table.

    Header and separator rows are skipped; every transcript entry must
    come back with its timestamp, in order.
    """
    rows = []
    for line in response.splitlines():
        if not line.strip():
            continue
        match = _TABLE_ROW.match(line)
        if match is None:
            if "|" in line:
                raise ParseError(f"malformed table row: {line!r}", raw=response)
            continue  # prose around the table is tolerated
        if _SEPARATOR.match(match.group(1).replace("|", "")):
            continue
        cells = [c.strip() for c in match.group(1).split("|")]
        if len(cells) != 2:
            raise ParseError(
                f"expected 2 table columns, got {len(cells)}: {line!r}", raw=response
            )
        try:
            timestamp = float(cells[0])
        except ValueError:
            if rows:  # a non-numeric first column after data rows is malformed
                raise ParseError(f"bad timestamp cell: {cells[0]!r}", raw=response) from None
            continue  # header row
        rows.append((timestamp, cells[1]))

    if len(rows) != len(transcript):
        raise AlignmentError(
            f"masked table has {len(rows)} rows but the transcript has "
            f"{len(transcript)} entries",
            raw=response,
        )
    for (got_t, _), (want_t, _, _) in zip(rows, transcript.entries):
        if abs(got_t - want_t) > 1e-6:
            raise AlignmentError(
                f"timestamp drift: masked row at {got_t} vs transcript entry at {want_t}",
                raw=response,
            )
    return MaskedTranscript(video_id=transcript.video_id, entries=tuple(rows))


def mask_transcript(transcript: DialogueTranscript, client: ChatClient) -> MaskedTranscript:
    if len(transcript) == 0:
        raise ValueError("transcript is empty")
    response = client.complete(build_masking_request(transcript), tag=f"mask_{transcript.video_id}")
    return parse_masked_table(response, transcript)


def build_inference_prompt(masked: MaskedTranscript, mg: MGEventLog | None = None) -> str:
    """Inference prompt + timestamped masked dialogue + optional MG JSON."""
    if len(masked) == 0:
        raise ValueError("masked transcript is empty")
    lines = [INFERENCE_PROMPT, "", "Transcription:"]
    lines.extend(f"{t:g}: {text}" for t, text in masked.entries)
    if mg is not None:
        lines.extend(["", "Micro-gestures (JSON):", mg.events_json()])
    return "\n".join(lines)


_BLOCK = r"win\s*:\s*(\d+(?:\.\d+)?)\s*[,;]\s*lose\s*:\s*(\d+(?:\.\d+)?)"
_TEXT_ONLY = re.compile(r"text\s*[-–]?\s*only\s*:\s*" + _BLOCK, re.IGNORECASE)
_TEXT_MG = re.compile(r"text\s*\+\s*micro\s*[-–]?\s*gestures?\s*:\s*" + _BLOCK, re.IGNORECASE)


def parse_confidences(response: str) -> InferenceResult:
    """Extract both confidence blocks; tolerant to whitespace and case,
    strict on structure, integrality, and the sum-to-100 rule."""
    pairs = {}
    for name, pattern in (("text_only", _TEXT_ONLY), ("text_mg", _TEXT_MG)):
        match = pattern.search(response)
        if match is None:
            raise ParseError(f"missing '{name}' confidence block", raw=response)
        values = []
        for token in match.groups():
            number = float(token)
            if number != int(number):
                raise ParseError(f"non-integer confidence score {token!r}", raw=response)
            values.append(int(number))
        if sum(values) != 100:
            raise ParseError(
                f"confidence sum != 100 in '{name}': {values[0]} + {values[1]}",
                raw=response,
            )
        pairs[name] = tuple(values)
    return InferenceResult(text_only=pairs["text_only"], text_mg=pairs["text_mg"])


def run_inference(masked: MaskedTranscript, mg: MGEventLog, client: ChatClient,
                  runs: int = 5) -> list[InferenceResult]:
    """Repeat the inference call `runs` times for one video."""
    if runs < 1:
        raise ValueError("need at least one run")
    prompt = build_inference_prompt(masked, mg)
    results = []
    for run in range(runs):
        response = client.complete(prompt, tag=f"infer_{masked.video_id}_run{run}")
        results.append(parse_confidences(response))
    return results


def score_accuracy(results: dict, ground_truth: dict, k: int) -> dict:
    """Acc@k per analysis mode, as percentages.

    `results` maps video_id -> list of InferenceResult (>= k runs);
    `ground_truth` maps video_id -> "win" | "lose". A run's prediction
    is the higher-confidence outcome; a tie counts as incorrect.
    Acc@k is the mean over the first k runs of the per-run accuracy.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not results:
        raise ValueError("no results to score")
    videos = sorted(results)
    missing = [v for v in videos if v not in ground_truth]
    if missing:
        raise ValueError(f"missing ground truth for: {missing}")
    for video in videos:
        if len(results[video]) < k:
            raise ValueError(
                f"video '{video}' has {len(results[video])} runs, need >= {k}"
            )
    scores = {}
    for mode in ("text_only", "text_mg"):
        run_accuracies = []
        for run in range(k):
            correct = sum(
                1
                for video in videos
                if results[video][run].prediction(mode) == ground_truth[video]
            )
            run_accuracies.append(correct / len(videos))
        scores[mode] = 100.0 * sum(run_accuracies) / k
    return scores
