"""Segment matching rewards: global overlap, paired NGIoU, and their mean."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .intervals import (
    EPS,
    SegmentSet,
    TimeInterval,
    interval_intersection_length,
    measure,
    span,
    union,
)


class MatchingStrategy(Enum):
    """How ground-truth and predicted segments are paired for the local term."""

    SEQUENTIAL = "sequential"
    MAXIMUM_WEIGHT = "maximum"
    GLOBAL_ONLY = "global"


@dataclass(frozen=True)
class PairAssignment:
    """One-to-one pairing of ground-truth and prediction indices.

    Each pair is (gt index or None, pred index or None); None marks the
    empty-segment pad on the shorter side. Every real index appears exactly
    once, and the number of pairs is max(len(gt), len(pred)).
    """

    pairs: tuple[tuple[Optional[int], Optional[int]], ...]


def ngiou(g: Optional[TimeInterval], p: Optional[TimeInterval]) -> float:
    """Normalized generalized overlap between two intervals, in [0, 1].

    0.5 * (1 + inter/union - uncovered/cover), where cover is the shortest
    interval containing both. Pairing with the empty segment scores 0;
    two identical zero-length intervals score 1 (shrinking-interval limit).
    """
    if g is None or p is None:
        return 0.0
    cover = span(g, p)
    if cover.length <= EPS:
        return 1.0
    inter = interval_intersection_length(g, p)
    union_len = g.length + p.length - inter
    iou = inter / union_len if union_len > EPS else 0.0
    gap = cover.length - union_len
    return 0.5 * (1.0 + iou - gap / cover.length)


def global_matching_reward(gt: SegmentSet, pred: SegmentSet) -> float:
    """Pairwise intersection mass over the measure of everything, clamped to [0, 1].

    Both sides empty counts as perfect agreement (1.0). A union of zero
    measure with anything present scores 0.0.
    """
    if not gt and not pred:
        return 1.0
    denom = measure(union(gt, pred))
    if denom <= EPS:
        return 0.0
    num = sum(
        interval_intersection_length(g, p) for g in gt.segments for p in pred.segments
    )
    return min(1.0, num / denom)


def _sorted_indices(s: SegmentSet) -> list[int]:
    # Stable order: start, then end, then original position.
    return sorted(range(len(s)), key=lambda k: (s.segments[k].start, s.segments[k].end, k))


def sequential_assignment(gt: SegmentSet, pred: SegmentSet) -> PairAssignment:
    """Pair k-th ground truth with k-th prediction after sorting both by start."""
    gt_order = _sorted_indices(gt)
    pred_order = _sorted_indices(pred)
    pairs: list[tuple[Optional[int], Optional[int]]] = []
    for k in range(max(len(gt_order), len(pred_order))):
        gi = gt_order[k] if k < len(gt_order) else None
        pj = pred_order[k] if k < len(pred_order) else None
        pairs.append((gi, pj))
    return PairAssignment(tuple(pairs))


def maximum_assignment(gt: SegmentSet, pred: SegmentSet) -> PairAssignment:
    """One-to-one pairing maximizing total NGIoU weight, solved exactly.

    The rectangular problem is padded to square with zero-weight dummy
    entries; a dummy partner realizes the empty-segment pad.
    """
    n_gt, n_pred = len(gt), len(pred)
    n = max(n_gt, n_pred)
    if n == 0:
        return PairAssignment(())
    weights = np.zeros((n, n))
    for i in range(n_gt):
        for j in range(n_pred):
            weights[i, j] = ngiou(gt.segments[i], pred.segments[j])
    rows, cols = linear_sum_assignment(weights, maximize=True)
    pairs: list[tuple[Optional[int], Optional[int]]] = []
    for i, j in zip(rows, cols):
        gi = int(i) if i < n_gt else None
        pj = int(j) if j < n_pred else None
        pairs.append((gi, pj))
    return PairAssignment(tuple(pairs))


def local_matching_reward(assignment: PairAssignment, gt: SegmentSet, pred: SegmentSet) -> float:
    """Mean NGIoU over all pairs; pads score 0. Empty-vs-empty scores 0."""
    n = max(len(gt), len(pred))
    if n == 0:
        return 0.0
    total = 0.0
    for gi, pj in assignment.pairs:
        g = gt.segments[gi] if gi is not None else None
        p = pred.segments[pj] if pj is not None else None
        total += ngiou(g, p)
    return total / n


def segment_matching_reward(
    gt: SegmentSet,
    pred: SegmentSet,
    strategy: MatchingStrategy = MatchingStrategy.SEQUENTIAL,
) -> float:
    """Combined matching reward: mean of global and local terms.

    GLOBAL_ONLY drops the local term entirely. When both sides are empty
    the prediction is vacuously perfect and the reward is 1.0.
    """
    r_global = global_matching_reward(gt, pred)
    if strategy is MatchingStrategy.GLOBAL_ONLY:
        return r_global
    if not gt and not pred:
        return 1.0
    if strategy is MatchingStrategy.SEQUENTIAL:
        assignment = sequential_assignment(gt, pred)
    else:
        assignment = maximum_assignment(gt, pred)
    r_local = local_matching_reward(assignment, gt, pred)
    return (r_global + r_local) / 2.0
