"""Group-relative RL sandbox over a synthetic grounding environment.

A tabular stochastic policy stands in for the language model: it samples a
segment count, perturbs the true segment endpoints with tunable noise, and
echoes answer timestamps into its think block with some probability.

Timestamp-aware reasoning couples to learning, not to the instantaneous
reward: boundary-noise feedback only converts into offset-scale calibration
to the extent the rollout actually committed to its timestamps. That is what
makes the reward schedule matter. An explicit timestamp reward buys the
scaffold early, but keeps paying its variance cost inside the group
advantages for as long as it stays switched on.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .intervals import SegmentSet, TimeInterval
from .parsing import serialize_answer
from .rewards import RewardBreakdown, RewardConfig, compute_reward

SCALE_MIN = 1e-3
MENTION_MIN = 0.02
MENTION_MAX = 0.98

CSV_COLUMNS = ("step", "phase", "mean_r_match", "mean_r_timestamp", "mean_r_format", "mean_count_gap")


@dataclass(frozen=True)
class GroundingTask:
    video_duration: float
    gt: SegmentSet
    multi_segment: bool


@dataclass(frozen=True)
class TabularPolicy:
    """Stochastic segment generator with three learnable knobs."""

    count_logits: tuple[float, ...]
    offset_scale: float
    timestamp_mention_prob: float

    def count_probs(self) -> np.ndarray:
        logits = np.asarray(self.count_logits, dtype=float)
        shifted = logits - logits.max()
        weights = np.exp(shifted)
        return weights / weights.sum()


@dataclass(frozen=True)
class Rollout:
    """One sampled output plus the statistics the update step needs."""

    raw: str
    count: int
    mentioned_fraction: float
    noise_scale_estimate: float


@dataclass(frozen=True)
class StepRecord:
    step: int
    phase: int
    mean_r_match: float
    mean_r_timestamp: float
    mean_r_format: float
    mean_count_gap: float
    multi_segment: bool


@dataclass
class TrainingLog:
    records: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in self.records:
            writer.writerow(
                [
                    rec.step,
                    rec.phase,
                    f"{rec.mean_r_match:.6f}",
                    f"{rec.mean_r_timestamp:.6f}",
                    f"{rec.mean_r_format:.6f}",
                    f"{rec.mean_count_gap:.6f}",
                ]
            )
        return buf.getvalue()

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


@dataclass(frozen=True)
class SimulationConfig:
    steps: int = 600
    group_size: int = 8
    learning_rate: float = 0.1
    count_bins: int = 6
    duration_range: tuple[float, float] = (20.0, 60.0)
    max_segments: int = 3
    multi_prob: float = 0.5
    init_offset_scale: float = 4.0
    init_mention_prob: float = 0.3
    mention_gating: float = 1.0

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.group_size < 2:
            raise ValueError("group_size must be at least 2")
        if self.count_bins < 1:
            raise ValueError("count_bins must be at least 1")
        if self.max_segments < 1:
            raise ValueError("max_segments must be at least 1")
        if not 0.0 <= self.multi_prob <= 1.0:
            raise ValueError("multi_prob must be within [0, 1]")
        if not 0.0 <= self.mention_gating <= 1.0:
            raise ValueError("mention_gating must be within [0, 1]")


def generate_task(
    rng: np.random.Generator,
    duration_range: tuple[float, float] = (20.0, 60.0),
    max_segments: int = 3,
    multi_prob: float = 0.5,
) -> GroundingTask:
    """Sample a grounding task with disjoint, sorted ground-truth segments."""
    duration = float(rng.uniform(*duration_range))
    multi = max_segments >= 2 and rng.random() < multi_prob
    if multi:
        n = int(rng.integers(2, max_segments + 1))
    else:
        n = 1
    points = np.sort(rng.uniform(0.0, duration, size=2 * n))
    segments = tuple(TimeInterval(points[2 * k], points[2 * k + 1]) for k in range(n))
    return GroundingTask(video_duration=duration, gt=SegmentSet(segments), multi_segment=n >= 2)


def _grouped_targets(gt: SegmentSet, count: int) -> list[TimeInterval]:
    """Target intervals for a prediction of `count` segments.

    Fewer predictions than ground truths lumps adjacent ground-truth
    segments and answers with each lump's covering interval (the lazy
    single-window answer, in the extreme).
    """
    n = len(gt)
    if count >= n:
        return list(gt.segments)
    bounds = np.linspace(0, n, count + 1).round().astype(int)
    targets = []
    for k in range(count):
        members = gt.segments[bounds[k] : bounds[k + 1]]
        targets.append(TimeInterval(members[0].start, members[-1].end))
    return targets


def rollout_group(
    policy: TabularPolicy,
    task: GroundingTask,
    group_size: int,
    rng_streams: Sequence[np.random.Generator],
) -> list[Rollout]:
    """Sample a group of outputs, one per rng stream."""
    if group_size < 2:
        raise ValueError("group_size must be at least 2")
    if len(rng_streams) != group_size:
        raise ValueError("need exactly one rng stream per rollout")
    probs = policy.count_probs()
    return [_sample_rollout(policy, task, probs, rng) for rng in rng_streams]


def _sample_rollout(
    policy: TabularPolicy,
    task: GroundingTask,
    count_probs: np.ndarray,
    rng: np.random.Generator,
) -> Rollout:
    duration = task.video_duration
    count = int(rng.choice(len(count_probs), p=count_probs)) + 1

    targets = _grouped_targets(task.gt, count)
    scale = policy.offset_scale
    p_mention = policy.timestamp_mention_prob

    # Each entry is (segment, start mentioned, end mentioned); flags stay
    # attached to their endpoint values through all sorting below.
    entries: list[tuple[TimeInterval, bool, bool]] = []
    estimates: list[float] = []
    for target in targets:
        pair: list[tuple[float, bool]] = []
        for value in (target.start, target.end):
            mentioned = bool(rng.random() < p_mention)
            noise = scale * float(rng.uniform(-1.0, 1.0))
            estimates.append(2.0 * abs(noise))
            pair.append((min(duration, max(0.0, value + noise)), mentioned))
        pair.sort(key=lambda item: item[0])
        entries.append((TimeInterval(pair[0][0], pair[1][0]), pair[0][1], pair[1][1]))

    for _ in range(count - len(targets)):
        lo, hi = np.sort(rng.uniform(0.0, duration, size=2))
        entries.append(
            (
                TimeInterval(float(lo), float(hi)),
                bool(rng.random() < p_mention),
                bool(rng.random() < p_mention),
            )
        )

    entries.sort(key=lambda item: (item[0].start, item[0].end))
    body = serialize_answer(SegmentSet(tuple(item[0] for item in entries)))

    flags = [flag for _, f_start, f_end in entries for flag in (f_start, f_end)]
    tokens = body.replace("-", " ").split()
    mentioned_tokens = [tok for tok, flag in zip(tokens, flags) if flag]
    if mentioned_tokens:
        think = "key moments near " + " and ".join(mentioned_tokens)
    else:
        think = "the scene plays out without closer inspection"
    raw = f"<think>{think}</think><answer>{body}</answer>"

    return Rollout(
        raw=raw,
        count=count,
        mentioned_fraction=float(np.mean(flags)) if flags else 0.0,
        noise_scale_estimate=float(np.mean(estimates)) if estimates else 0.0,
    )


def group_advantages(rewards: Sequence[float]) -> list[float]:
    """Center and scale rewards within a rollout group.

    Uses the population standard deviation; a group with (near) zero spread
    yields all-zero advantages.
    """
    if len(rewards) < 2:
        raise ValueError(f"advantage normalization needs at least 2 rewards, got {len(rewards)}")
    arr = np.asarray(rewards, dtype=float)
    std = float(arr.std())
    if std < 1e-12:
        return [0.0] * len(rewards)
    mean = float(arr.mean())
    return [float((r - mean) / std) for r in arr]


def policy_update(
    policy: TabularPolicy,
    rollouts: Sequence[Rollout],
    advantages: Sequence[float],
    learning_rate: float,
    mention_gating: float = 1.0,
) -> TabularPolicy:
    """Score-function update of the tabular policy from one rollout group.

    A rollout's boundary-noise feedback moves offset_scale only in proportion
    to how much of its reasoning committed to timestamps (mention_gating
    scales that coupling; 0 disables it).
    """
    if len(rollouts) != len(advantages):
        raise ValueError("rollouts and advantages must have matching lengths")
    adv = np.asarray(advantages, dtype=float)
    if not adv.any():
        return policy

    probs = policy.count_probs()
    grad_logits = np.zeros_like(probs)
    grad_scale = 0.0
    grad_mention = 0.0
    for rollout, a in zip(rollouts, adv):
        onehot = np.zeros_like(probs)
        onehot[rollout.count - 1] = 1.0
        gate = (1.0 - mention_gating) + mention_gating * rollout.mentioned_fraction
        grad_logits += a * (onehot - probs)
        grad_scale += a * gate * (rollout.noise_scale_estimate - policy.offset_scale)
        grad_mention += a * (rollout.mentioned_fraction - policy.timestamp_mention_prob)
    n = len(rollouts)

    logits = np.asarray(policy.count_logits) + learning_rate * grad_logits / n
    scale = policy.offset_scale + learning_rate * grad_scale / n
    mention = policy.timestamp_mention_prob + learning_rate * grad_mention / n
    return TabularPolicy(
        count_logits=tuple(float(x) for x in logits),
        offset_scale=max(SCALE_MIN, scale),
        timestamp_mention_prob=min(MENTION_MAX, max(MENTION_MIN, mention)),
    )


def _rng(seed: int, step: int, lane: int) -> np.random.Generator:
    # One master seed fans out to independent streams; parallel and serial
    # rollout evaluation see identical draws.
    return np.random.default_rng([seed, step, lane])


def run_simulation(
    cfg: RewardConfig = RewardConfig(),
    sim: SimulationConfig = SimulationConfig(),
    seed: int = 0,
) -> TrainingLog:
    """Train the tabular policy for sim.steps update steps and log each one."""
    policy = TabularPolicy(
        count_logits=(0.0,) * sim.count_bins,
        offset_scale=sim.init_offset_scale,
        timestamp_mention_prob=sim.init_mention_prob,
    )
    log = TrainingLog()
    for step in range(1, sim.steps + 1):
        task = generate_task(_rng(seed, step, 0), sim.duration_range, sim.max_segments, sim.multi_prob)
        streams = [_rng(seed, step, 1 + i) for i in range(sim.group_size)]
        rollouts = rollout_group(policy, task, sim.group_size, streams)
        breakdowns = [compute_reward(task.gt, r.raw, step, cfg) for r in rollouts]
        advantages = group_advantages([b.total for b in breakdowns])
        policy = policy_update(policy, rollouts, advantages, sim.learning_rate, sim.mention_gating)
        log.records.append(_summarize(step, task, rollouts, breakdowns))
    return log


def _summarize(
    step: int,
    task: GroundingTask,
    rollouts: Sequence[Rollout],
    breakdowns: Sequence[RewardBreakdown],
) -> StepRecord:
    n_gt = len(task.gt)
    return StepRecord(
        step=step,
        phase=breakdowns[0].phase,
        mean_r_match=float(np.mean([b.r_match for b in breakdowns])),
        mean_r_timestamp=float(np.mean([b.r_timestamp for b in breakdowns])),
        mean_r_format=float(np.mean([b.r_format for b in breakdowns])),
        mean_count_gap=float(np.mean([abs(r.count - n_gt) for r in rollouts])),
        multi_segment=task.multi_segment,
    )
