"""Reward engine, metrics, and a group-relative RL sandbox for multi-segment temporal grounding."""

from .intervals import SegmentSet, TimeInterval, intersection, measure, span, union
from .matching import (
    MatchingStrategy,
    PairAssignment,
    global_matching_reward,
    local_matching_reward,
    maximum_assignment,
    ngiou,
    segment_matching_reward,
    sequential_assignment,
)
from .metrics import EvalRecord, MetricReport, f1_at_threshold, miou, multi_segment_f1
from .parsing import ModelOutput, format_reward, parse_output, serialize_answer, timestamp_reward
from .rewards import (
    RewardBreakdown,
    RewardConfig,
    TimestampDirection,
    compute_reward,
    phase_total,
)
from .sim import (
    GroundingTask,
    SimulationConfig,
    TabularPolicy,
    TrainingLog,
    generate_task,
    group_advantages,
    policy_update,
    rollout_group,
    run_simulation,
)

__version__ = "0.1.0"

__all__ = [
    "EvalRecord",
    "GroundingTask",
    "MatchingStrategy",
    "MetricReport",
    "ModelOutput",
    "PairAssignment",
    "RewardBreakdown",
    "RewardConfig",
    "SegmentSet",
    "SimulationConfig",
    "TabularPolicy",
    "TimeInterval",
    "TimestampDirection",
    "TrainingLog",
    "compute_reward",
    "f1_at_threshold",
    "format_reward",
    "generate_task",
    "global_matching_reward",
    "group_advantages",
    "intersection",
    "local_matching_reward",
    "maximum_assignment",
    "measure",
    "miou",
    "multi_segment_f1",
    "ngiou",
    "parse_output",
    "phase_total",
    "policy_update",
    "rollout_group",
    "run_simulation",
    "segment_matching_reward",
    "sequential_assignment",
    "serialize_answer",
    "span",
    "timestamp_reward",
    "union",
]
