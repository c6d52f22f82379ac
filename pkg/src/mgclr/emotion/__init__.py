"""LLM-based masked-dialogue emotion inference: transcript masking,
micro-gesture-assisted prompts, confidence parsing, and Acc@k scoring,
with an offline mock client for tests."""

from .client import ChatClient, ChatClientError, MockTransportError
from .harness import (
    AlignmentError,
    InferenceResult,
    MaskedTranscript,
    ParseError,
    build_inference_prompt,
    mask_transcript,
    parse_confidences,
    parse_masked_table,
    run_inference,
    score_accuracy,
)
from .prompts import INFERENCE_PROMPT, MASKING_PROMPT, build_priorcheck_prompts
from .transcripts import DialogueTranscript, MGEvent, MGEventLog, load_mg_log, load_transcript
from .vocab import DEFAULT_MG_VOCABULARY, load_vocabulary

__all__ = [
    "ChatClient",
    "ChatClientError",
    "MockTransportError",
    "DialogueTranscript",
    "MGEvent",
    "MGEventLog",
    "load_transcript",
    "load_mg_log",
    "MaskedTranscript",
    "InferenceResult",
    "ParseError",
    "AlignmentError",
    "mask_transcript",
    "parse_masked_table",
    "build_inference_prompt",
    "parse_confidences",
    "run_inference",
    "score_accuracy",
    "MASKING_PROMPT",
    "INFERENCE_PROMPT",
    "build_priorcheck_prompts",
    "DEFAULT_MG_VOCABULARY",
    "load_vocabulary",
]
