"""Prompt templates for the masking and inference protocol and the
prior-knowledge checks. The two protocol prompts are fixed strings;
downstream parsing depends on their exact output-format instructions,
so do not edit them casually."""

from __future__ import annotations

from dataclasses import dataclass

from .transcripts import DialogueTranscript
from .vocab import full_vocabulary

MASKING_PROMPT = (
    "You are a professional text encryption expert. You will need to process the "
    "following text so that any information related to the outcome of the game and "
    "the player's identity is hidden within the text.\n"
    "1) Please replace the text that needs to be hidden with [MASK].\n"
    "2) Please process each sentence separately and output each sentence after "
    "hiding the key information according to the original format.\n"
    "3) As an expert, you will not only hide information that directly reveals "
    '"game results and player identity and emotions", but also hide clues that may '
    "reveal information, such as some emotion-related descriptors, or about some "
    "in-game situations).\n"
    "The text you're dealing with is a post-match interview between a player and a "
    "reporter, a conversation between two people. Please organize the output into a "
    "Markdown table. The first column is the timestamp and the second column is the "
    "text behind the hidden information.\n"
    "Every sentence must be strictly hidden, and words that may reveal the game "
    "situation in questions asked by reporters also need to be hidden. For example, "
    "words such as congratulations, winner, etc."
)

INFERENCE_PROMPT = (
    "Below, I will send you the transcription of a post-match interview with an "
    "athlete, along with their micro-gestures during this process. Both types of "
    "information include timestamps, so you can match them up. First, please "
    "analyze only the text to determine the outcome of the athlete's performance "
    "in the match. Then, integrate the text with the micro-gesture information to "
    "analyze the outcome of the athlete's performance in the match. Please output "
    "the results in the following format: text-only: win: confidence score, lose: "
    "confidence score. text+micro-gestures: win: confidence score, lose: "
    "confidence score. Please indicate to what extent you think the athlete "
    "lost/won, and ensure that the sum of the confidence levels is 100 in both "
    "text-only and text+micro-gestures. When adding micro-gestures to the "
    "analysis, if clues indicate that the inference is contrary to the analysis "
    "using only text, please output it truthfully. You don't need to keep the "
    "results consistent between text-only analysis and micro-gesture analysis. "
    "Please do not output anything else."
)

MG_EMOTION_TEMPLATE = "What emotion do you think the {label} below represents?"

MATCH_FACT_TEMPLATE = (
    "In the {draw} {round}st Round of the {year} {tournament}, the match between "
    "{player_1} and {player_2}, who is the winner? A. {player_1}; B. {player_2}"
)


def render_transcript_table(transcript: DialogueTranscript) -> str:
    """Markdown table sent alongside the masking prompt."""
    lines = ["| timestamp | speaker | text |", "| --- | --- | --- |"]
    for t, speaker, text in transcript.entries:
        lines.append(f"| {t:g} | {speaker} | {text} |")
    return "\n".join(lines)


def build_masking_request(transcript: DialogueTranscript) -> str:
    return MASKING_PROMPT + "\n\n" + render_transcript_table(transcript)


@dataclass(frozen=True)
class MatchRecord:
    draw: str        # "Man's Singles" | "Women's Singles"
    round: int
    year: int
    tournament: str
    player_1: str
    player_2: str

    def __post_init__(self):
        if self.draw not in ("Man's Singles", "Women's Singles"):
            raise ValueError(f"unknown draw {self.draw!r}")


def build_priorcheck_prompts(items, vocabulary=None) -> list[str]:
    """One prompt per micro-gesture label or match record.

    Labels outside the vocabulary are rejected so typos cannot silently
    probe the model about gestures the taxonomy does not define.
    """
    allowed = set(vocabulary if vocabulary is not None else full_vocabulary())
    prompts = []
    for item in items:
        if isinstance(item, MatchRecord):
            prompts.append(
                MATCH_FACT_TEMPLATE.format(
                    draw=item.draw,
                    round=item.round,
                    year=item.year,
                    tournament=item.tournament,
                    player_1=item.player_1,
                    player_2=item.player_2,
                )
            )
        elif isinstance(item, str):
            if item not in allowed:
                raise ValueError(f"unknown micro-gesture label {item!r}")
            prompts.append(MG_EMOTION_TEMPLATE.format(label=item))
        else:
            raise TypeError(f"expected label or MatchRecord, got {type(item).__name__}")
    return prompts
