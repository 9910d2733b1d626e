"""Phased reward composition and its configuration."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Any, Mapping, Optional

from .intervals import SegmentSet
from .matching import (
    MatchingStrategy,
    global_matching_reward,
    local_matching_reward,
    maximum_assignment,
    segment_matching_reward,
    sequential_assignment,
)
from .parsing import format_reward, parse_output, timestamp_reward


class TimestampDirection(Enum):
    """Which containment the timestamp reward checks."""

    ANSWER_IN_REASONING = "answer_in_reasoning"
    REASONING_IN_ANSWER = "reasoning_in_answer"


@dataclass(frozen=True)
class RewardConfig:
    alpha: float = 2.0
    beta: float = 0.4
    phase_switch_step: int = 400
    timestamp_tolerance: float = 0.005
    strategy: MatchingStrategy = MatchingStrategy.SEQUENTIAL
    timestamp_direction: TimestampDirection = TimestampDirection.ANSWER_IN_REASONING

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be within [0, 1], got {self.beta}")
        if self.phase_switch_step < 0:
            raise ValueError(f"phase_switch_step must be non-negative, got {self.phase_switch_step}")
        if self.timestamp_tolerance < 0:
            raise ValueError(f"timestamp_tolerance must be non-negative, got {self.timestamp_tolerance}")


@dataclass(frozen=True)
class RewardBreakdown:
    """All reward components for one output, plus the phase-composed total.

    r_local is None when the local term does not apply (global-only strategy,
    or the vacuous case where both segment lists are empty).
    """

    r_global: float
    r_local: Optional[float]
    r_match: float
    r_timestamp: int
    r_format: int
    total: float
    phase: int

    def as_dict(self) -> dict[str, Any]:
        return {
            "r_global": self.r_global,
            "r_local": self.r_local,
            "r_match": self.r_match,
            "r_timestamp": self.r_timestamp,
            "r_format": self.r_format,
            "total": self.total,
            "phase": self.phase,
        }


def phase_for_step(step: int, cfg: RewardConfig) -> int:
    """Phase 1 through the switch step inclusive, phase 2 after."""
    return 1 if step <= cfg.phase_switch_step else 2


def phase_total(phase: int, r_timestamp: float, r_format: float, r_match: float, cfg: RewardConfig) -> float:
    """Compose the final reward for a phase from its components."""
    if phase == 1:
        return cfg.beta * r_timestamp + (1.0 - cfg.beta) * r_format + cfg.alpha * r_match
    if phase == 2:
        return r_format + cfg.alpha * r_match
    raise ValueError(f"phase must be 1 or 2, got {phase}")


def compute_reward(gt: SegmentSet, raw_output: str, step: int, cfg: RewardConfig = RewardConfig()) -> RewardBreakdown:
    """Score one raw output against ground-truth segments at a training step.

    Never raises on output content: parse failures feed an empty prediction
    set into the matching reward and zero the format and timestamp rewards.
    """
    output = parse_output(raw_output)
    r_f = format_reward(output)
    r_t = timestamp_reward(
        output,
        tolerance=cfg.timestamp_tolerance,
        require_reasoning_in_answer=cfg.timestamp_direction is TimestampDirection.REASONING_IN_ANSWER,
    )
    pred = output.answer_segments if output.answer_segments is not None else SegmentSet()

    r_g = global_matching_reward(gt, pred)
    r_l: Optional[float] = None
    if cfg.strategy is not MatchingStrategy.GLOBAL_ONLY and (gt or pred):
        if cfg.strategy is MatchingStrategy.SEQUENTIAL:
            assignment = sequential_assignment(gt, pred)
        else:
            assignment = maximum_assignment(gt, pred)
        r_l = local_matching_reward(assignment, gt, pred)
    r_m = segment_matching_reward(gt, pred, cfg.strategy)

    phase = phase_for_step(step, cfg)
    return RewardBreakdown(
        r_global=r_g,
        r_local=r_l,
        r_match=r_m,
        r_timestamp=r_t,
        r_format=r_f,
        total=phase_total(phase, r_t, r_f, r_m, cfg),
        phase=phase,
    )


_STRATEGY_ALIASES = {
    "sequential": MatchingStrategy.SEQUENTIAL,
    "maximum": MatchingStrategy.MAXIMUM_WEIGHT,
    "global": MatchingStrategy.GLOBAL_ONLY,
}

_DIRECTION_ALIASES = {d.value: d for d in TimestampDirection}


def config_from_mapping(data: Mapping[str, Any], base: RewardConfig = RewardConfig()) -> RewardConfig:
    """Build a RewardConfig from a plain key-value mapping.

    Unknown keys raise a ValueError naming every offending key.
    """
    known = {f.name for f in fields(RewardConfig)}
    bad = sorted(set(data) - known)
    if bad:
        raise ValueError(f"unknown config keys: {', '.join(bad)}")
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key == "strategy":
            value = parse_strategy(value)
        elif key == "timestamp_direction":
            if not isinstance(value, TimestampDirection):
                if value not in _DIRECTION_ALIASES:
                    raise ValueError(
                        f"timestamp_direction must be one of {sorted(_DIRECTION_ALIASES)}, got {value!r}"
                    )
                value = _DIRECTION_ALIASES[value]
        elif key == "phase_switch_step":
            value = int(value)
        else:
            value = float(value)
        kwargs[key] = value
    return replace(base, **kwargs)


def parse_strategy(value: Any) -> MatchingStrategy:
    if isinstance(value, MatchingStrategy):
        return value
    if value not in _STRATEGY_ALIASES:
        raise ValueError(f"strategy must be one of {sorted(_STRATEGY_ALIASES)}, got {value!r}")
    return _STRATEGY_ALIASES[value]


def load_config(path: str, base: RewardConfig = RewardConfig()) -> RewardConfig:
    """Read a JSON config file whose keys mirror RewardConfig fields."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config file must hold a JSON object, got {type(data).__name__}")
    return config_from_mapping(data, base)
