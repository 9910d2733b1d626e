"""Shared oracles and generators for the test suite.

The grid oracle samples membership at cell midpoints; with endpoints
quantized to hundredths (the answer grammar's resolution) every cell is
either fully inside or fully outside a segment, so the count is exact.
"""

from __future__ import annotations

from itertools import permutations
from typing import Optional, Sequence

import numpy as np

from timeseg.intervals import SegmentSet, TimeInterval
from timeseg.matching import ngiou

GRID_RESOLUTION = 0.001

Pairs = list[tuple[float, float]]


def grid_cells(limit: float, resolution: float = GRID_RESOLUTION) -> np.ndarray:
    n = int(np.ceil(limit / resolution)) + 1
    return (np.arange(n) + 0.5) * resolution


def grid_mask(pairs: Sequence[tuple[float, float]], cells: np.ndarray) -> np.ndarray:
    mask = np.zeros(cells.shape, dtype=bool)
    for start, end in pairs:
        mask |= (cells >= start) & (cells <= end)
    return mask


def grid_measure(pairs: Sequence[tuple[float, float]], resolution: float = GRID_RESOLUTION) -> float:
    if not pairs:
        return 0.0
    cells = grid_cells(max(end for _, end in pairs), resolution)
    return float(grid_mask(pairs, cells).sum()) * resolution


def grid_intersection_measure(
    a: Sequence[tuple[float, float]],
    b: Sequence[tuple[float, float]],
    resolution: float = GRID_RESOLUTION,
) -> float:
    if not a or not b:
        return 0.0
    limit = max(end for _, end in [*a, *b])
    cells = grid_cells(limit, resolution)
    return float((grid_mask(a, cells) & grid_mask(b, cells)).sum()) * resolution


def grid_union_measure(
    a: Sequence[tuple[float, float]],
    b: Sequence[tuple[float, float]],
    resolution: float = GRID_RESOLUTION,
) -> float:
    return grid_measure([*a, *b], resolution)


def grid_global_matching(a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]]) -> float:
    """Pairwise intersection mass over union measure, straight off the grid."""
    num = sum(grid_intersection_measure([g], [p]) for g in a for p in b)
    denom = grid_union_measure(a, b)
    if denom <= 0:
        return 0.0
    return min(1.0, num / denom)


def reference_giou(g: tuple[float, float], p: tuple[float, float]) -> float:
    """Independent generalized-overlap implementation for cross-checking."""
    inter = max(0.0, min(g[1], p[1]) - max(g[0], p[0]))
    union = (g[1] - g[0]) + (p[1] - p[0]) - inter
    cover = max(g[1], p[1]) - min(g[0], p[0])
    iou = inter / union if union > 0 else 0.0
    return iou - (cover - union) / cover if cover > 0 else iou


def random_pairs(
    rng: np.random.Generator,
    min_segments: int = 1,
    max_segments: int = 8,
    duration: float = 100.0,
    quantize: bool = True,
) -> Pairs:
    n = int(rng.integers(min_segments, max_segments + 1))
    pairs = []
    for _ in range(n):
        a, b = rng.uniform(0.0, duration, size=2)
        if quantize:
            a, b = round(a, 2), round(b, 2)
        pairs.append((min(a, b), max(a, b)))
    return pairs


def segment_set(pairs: Sequence[tuple[float, float]]) -> SegmentSet:
    return SegmentSet.from_pairs(pairs)


def brute_force_best_pairing(gt: SegmentSet, pred: SegmentSet) -> float:
    """Exhaustive best total NGIoU over all one-to-one pairings with padding."""
    n = max(len(gt), len(pred))
    if n == 0:
        return 0.0
    gt_slots: list[Optional[TimeInterval]] = list(gt.segments) + [None] * (n - len(gt))
    pred_slots: list[Optional[TimeInterval]] = list(pred.segments) + [None] * (n - len(pred))
    best = 0.0
    for perm in permutations(range(n)):
        total = sum(ngiou(gt_slots[i], pred_slots[perm[i]]) for i in range(n))
        best = max(best, total)
    return best


def brute_force_best_tp(gt: SegmentSet, pred: SegmentSet, tau: float) -> int:
    """Exhaustive maximum number of one-to-one pairs with IoU >= tau."""
    from timeseg.metrics import interval_iou

    n = max(len(gt), len(pred))
    if n == 0:
        return 0
    gt_slots: list[Optional[TimeInterval]] = list(gt.segments) + [None] * (n - len(gt))
    pred_slots: list[Optional[TimeInterval]] = list(pred.segments) + [None] * (n - len(pred))
    best = 0
    for perm in permutations(range(n)):
        tp = 0
        for i in range(n):
            g, p = gt_slots[i], pred_slots[perm[i]]
            if g is not None and p is not None and interval_iou(g, p) >= tau:
                tp += 1
        best = max(best, tp)
    return best
