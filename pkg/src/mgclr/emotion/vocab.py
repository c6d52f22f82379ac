"""Micro-gesture category vocabulary.

31 micro-gesture labels grouped by body region plus one non-MG
"illustrative gesture" bucket, matching the five-family organization
(head, body, hand, body-hand, head-hand) used for press-conference
footage. This is the package default; event logs referencing a custom
taxonomy can load their own list from JSON.
"""

from __future__ import annotations

import json
from pathlib import Path

DEFAULT_MG_VOCABULARY: tuple = (
    # head
    "Scratching head",
    "Touching forehead",
    "Covering face",
    "Rubbing eyes",
    "Touching nose",
    "Touching ear",
    "Touching jaw",
    "Touching hat",
    "Playing with hair",
    "Pressing lips",
    "Bulging face / deep breath",
    "Sighing",
    # body
    "Shaking shoulders",
    "Moving torso",
    "Sitting upright",
    "Leaning forward",
    "Crossing legs",
    "Shaking legs",
    # hand
    "Rubbing hands",
    "Crossing fingers",
    "Playing with objects",
    "Tapping fingers",
    "Clenching fist",
    "Hiding hands",
    # body-hand
    "Scratching arms",
    "Folding arms",
    "Touching chest",
    "Arms akimbo",
    "Putting hands behind body",
    # head-hand
    "Touching neck",
    "Covering suprasternal notch",
)

ILLUSTRATIVE_LABEL = "Illustrative gesture"


def full_vocabulary() -> tuple:
    """All 32 assignable labels: 31 micro-gestures plus the non-MG bucket."""
    return DEFAULT_MG_VOCABULARY + (ILLUSTRATIVE_LABEL,)


def load_vocabulary(path) -> tuple:
    """Load a custom label list from a JSON array of strings."""
    labels = json.loads(Path(path).read_text())
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ValueError("vocabulary file must be a JSON array of strings")
    if len(set(labels)) != len(labels):
        raise ValueError("vocabulary labels must be unique")
    return tuple(labels)
