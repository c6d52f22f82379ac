"""Interview transcripts and timestamped micro-gesture event logs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .vocab import full_vocabulary

SPEAKERS = ("reporter", "player")


@dataclass(frozen=True)
class DialogueTranscript:
    """Ordered (timestamp, speaker, text) entries of one interview."""

    video_id: str
    entries: tuple  # of (float seconds, speaker, text)

    def __post_init__(self):
        entries = tuple((float(t), str(s), str(x)) for t, s, x in self.entries)
        last = -float("inf")
        for t, speaker, text in entries:
            if t < last:
                raise ValueError(f"timestamps must be non-decreasing (saw {t} after {last})")
            last = t
            if speaker not in SPEAKERS:
                raise ValueError(f"unknown speaker '{speaker}' (expected one of {SPEAKERS})")
            if not text.strip():
                raise ValueError(f"empty text at t={t}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class MGEvent:
    timestamp: float
    label: str


@dataclass(frozen=True)
class MGEventLog:
    """Timestamped micro-gesture labels plus the match outcome."""

    video_id: str
    ground_truth: str  # "win" | "lose"
    events: tuple = field(default_factory=tuple)
    vocabulary: tuple = field(default_factory=full_vocabulary, compare=False)

    def __post_init__(self):
        if self.ground_truth not in ("win", "lose"):
            raise ValueError(f"ground_truth must be 'win' or 'lose', got {self.ground_truth!r}")
        events = tuple(
            e if isinstance(e, MGEvent) else MGEvent(float(e[0]), str(e[1]))
            for e in self.events
        )
        allowed = set(self.vocabulary)
        last = -float("inf")
        for event in events:
            if event.timestamp < last:
                raise ValueError("event timestamps must be non-decreasing")
            last = event.timestamp
            if event.label not in allowed:
                raise ValueError(f"unknown micro-gesture label {event.label!r}")
        object.__setattr__(self, "events", events)

    def events_json(self) -> str:
        """Deterministic JSON rendering used inside prompts."""
        return json.dumps(
            [{"t": e.timestamp, "label": e.label} for e in self.events],
            ensure_ascii=False,
        )


def load_transcript(path) -> DialogueTranscript:
    """{video_id, entries: [{t, speaker, text}, ...]}"""
    payload = json.loads(Path(path).read_text())
    return DialogueTranscript(
        video_id=str(payload["video_id"]),
        entries=tuple((e["t"], e["speaker"], e["text"]) for e in payload["entries"]),
    )


def save_transcript(transcript: DialogueTranscript, path) -> None:
    payload = {
        "video_id": transcript.video_id,
        "entries": [
            {"t": t, "speaker": s, "text": x} for t, s, x in transcript.entries
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def load_mg_log(path, vocabulary=None) -> MGEventLog:
    """{video_id, ground_truth: "win"|"lose", events: [{t, label}, ...]}"""
    payload = json.loads(Path(path).read_text())
    kwargs = {}
    if vocabulary is not None:
        kwargs["vocabulary"] = tuple(vocabulary)
    return MGEventLog(
        video_id=str(payload["video_id"]),
        ground_truth=str(payload["ground_truth"]),
        events=tuple((e["t"], e["label"]) for e in payload["events"]),
        **kwargs,
    )
