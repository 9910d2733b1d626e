"""Parsing of model outputs shaped like <think>...</think><answer>...</answer>.

The answer body is a whitespace-separated list of `X.XX-X.XX` range tokens:
one-or-more digits with an optional fractional part on each side of an ASCII
hyphen. Anything else in the answer body breaks well-formedness. Parsing
never raises; malformed input comes back with well_formed=False and whatever
fields could still be recovered.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .intervals import SegmentSet, TimeInterval

THINK_RE = re.compile(r"<think>(.*?)</think>", re.DOTALL)
ANSWER_RE = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)
RANGE_TOKEN_RE = re.compile(r"\A(\d+(?:\.\d+)?)-(\d+(?:\.\d+)?)\Z")

# Decimal literals not butted against letters (skips "mp4", "x264") and not
# continuing another number (skips the ".3" tail of "1.2.3").
NUMBER_SCAN_RE = re.compile(r"(?<![A-Za-z0-9.])\d+(?:\.\d+)?(?![A-Za-z0-9])")

DEFAULT_TOLERANCE = 0.005


@dataclass(frozen=True)
class ModelOutput:
    """Parse result for one raw model output."""

    raw: str
    think: Optional[str] = None
    answer: Optional[str] = None
    answer_segments: Optional[SegmentSet] = None
    answer_timestamps: tuple[float, ...] = ()
    reasoning_timestamps: tuple[float, ...] = ()
    well_formed: bool = False


def _blank(text: str) -> bool:
    return not text.strip()


def _parse_answer_body(body: str) -> Optional[SegmentSet]:
    segments = []
    for token in body.split():
        m = RANGE_TOKEN_RE.match(token)
        if m is None:
            return None
        try:
            segments.append(TimeInterval(float(m.group(1)), float(m.group(2))))
        except ValueError:
            return None
    return SegmentSet(tuple(segments))


def scan_timestamps(text: str) -> tuple[float, ...]:
    """All standalone decimal literals in the text, in order of appearance."""
    return tuple(float(m.group(0)) for m in NUMBER_SCAN_RE.finditer(text))


def parse_output(raw: str) -> ModelOutput:
    """Parse a raw output string. Total: never raises on any input."""
    think_match = THINK_RE.search(raw)
    answer_match = ANSWER_RE.search(raw)
    think = think_match.group(1) if think_match else None
    answer = answer_match.group(1) if answer_match else None

    segments: Optional[SegmentSet] = None
    if answer is not None:
        segments = _parse_answer_body(answer)

    # Required structure: one think block, then one answer block, nothing but
    # whitespace before, between, or after.
    structured = (
        think_match is not None
        and answer_match is not None
        and _blank(raw[: think_match.start()])
        and think_match.end() <= answer_match.start()
        and _blank(raw[think_match.end() : answer_match.start()])
        and _blank(raw[answer_match.end() :])
    )

    return ModelOutput(
        raw=raw,
        think=think,
        answer=answer,
        answer_segments=segments,
        answer_timestamps=tuple(t for seg in segments or () for t in (seg.start, seg.end)),
        reasoning_timestamps=scan_timestamps(think) if think is not None else (),
        well_formed=bool(structured and segments is not None),
    )


def format_reward(output: ModelOutput) -> int:
    """1 if the output follows the required structure, else 0."""
    return 1 if output.well_formed else 0


def timestamp_reward(
    output: ModelOutput,
    tolerance: float = DEFAULT_TOLERANCE,
    require_reasoning_in_answer: bool = False,
) -> int:
    """1 if every answer timestamp also appears in the reasoning text.

    Matching is numeric within `tolerance` seconds, so "4" in the reasoning
    matches "4.00" in the answer. Vacuously 1 when there is nothing to match;
    always 0 for malformed output. With require_reasoning_in_answer the
    containment is checked in the opposite direction (every reasoning
    timestamp must appear in the answer).
    """
    if not output.well_formed:
        return 0
    if require_reasoning_in_answer:
        needles, haystack = output.reasoning_timestamps, output.answer_timestamps
    else:
        needles, haystack = output.answer_timestamps, output.reasoning_timestamps
    for t in needles:
        if not any(abs(t - s) <= tolerance for s in haystack):
            return 0
    return 1


def serialize_answer(segments: SegmentSet) -> str:
    """Answer body for a segment set: `X.XX-X.XX` tokens, two decimals, given order."""
    return " ".join(f"{seg.start:.2f}-{seg.end:.2f}" for seg in segments)
