"""Benchmark scoring: mean IoU for single-segment grounding and
threshold-averaged F1 for multi-segment grounding.

F1 counts true positives under the best one-to-one pairing of predictions to
ground truths with IoU at or above the threshold. The maximum matched count
is unique, so scores do not depend on any tie-break convention.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .intervals import SegmentSet, TimeInterval, interval_intersection_length

F1_THRESHOLDS = (0.1, 0.3, 0.5, 0.7)


@dataclass(frozen=True)
class EvalRecord:
    id: str
    gt: SegmentSet
    pred: SegmentSet


@dataclass(frozen=True)
class MetricReport:
    n_records: int
    miou: Optional[float] = None
    f1_per_threshold: dict[float, float] = field(default_factory=dict)
    f1_mean: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "miou": self.miou,
            "f1_per_threshold": {f"{tau:g}": v for tau, v in self.f1_per_threshold.items()},
            "f1_mean": self.f1_mean,
        }


def interval_iou(a: TimeInterval, b: TimeInterval) -> float:
    inter = interval_intersection_length(a, b)
    union = a.length + b.length - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def _first_segment(s: SegmentSet, record_id: str, side: str) -> Optional[TimeInterval]:
    if not s:
        return None
    if len(s) > 1:
        warnings.warn(
            f"record {record_id}: {side} has {len(s)} segments; single-segment scoring uses the first",
            stacklevel=3,
        )
    return s.segments[0]


def miou(records: Sequence[EvalRecord]) -> float:
    """Mean IoU over records, each scored on its first gt/pred segment.

    A record with an empty prediction (or empty ground truth) scores 0.
    """
    if not records:
        raise ValueError("miou needs at least one record")
    total = 0.0
    for rec in records:
        g = _first_segment(rec.gt, rec.id, "gt")
        p = _first_segment(rec.pred, rec.id, "pred")
        if g is None or p is None:
            continue
        total += interval_iou(g, p)
    return total / len(records)


def iou_matrix(gt: SegmentSet, pred: SegmentSet) -> np.ndarray:
    matrix = np.zeros((len(gt), len(pred)))
    for i, g in enumerate(gt.segments):
        for j, p in enumerate(pred.segments):
            matrix[i, j] = interval_iou(g, p)
    return matrix


def tp_count(gt: SegmentSet, pred: SegmentSet, tau: float) -> int:
    """Maximum number of one-to-one (gt, pred) pairs with IoU >= tau."""
    if not gt or not pred:
        return 0
    qualifies = (iou_matrix(gt, pred) >= tau).astype(float)
    rows, cols = linear_sum_assignment(qualifies, maximize=True)
    return int(qualifies[rows, cols].sum())


def f1_at_threshold(gt: SegmentSet, pred: SegmentSet, tau: float) -> float:
    """Detection-style F1 at one IoU threshold."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be within (0, 1], got {tau}")
    if not gt and not pred:
        return 1.0
    if not gt or not pred:
        return 0.0
    return 2.0 * tp_count(gt, pred, tau) / (len(gt) + len(pred))


def multi_segment_f1(records: Sequence[EvalRecord], thresholds: Sequence[float] = F1_THRESHOLDS) -> MetricReport:
    """Per-threshold F1 averaged over records, then averaged across thresholds."""
    if not records:
        raise ValueError("multi_segment_f1 needs at least one record")
    per_threshold = {
        tau: sum(f1_at_threshold(rec.gt, rec.pred, tau) for rec in records) / len(records)
        for tau in thresholds
    }
    return MetricReport(
        n_records=len(records),
        f1_per_threshold=per_threshold,
        f1_mean=sum(per_threshold.values()) / len(per_threshold),
    )


def read_records(lines: Iterable[str]) -> list[EvalRecord]:
    """Parse line-delimited JSON records with `id`, `gt`, and `pred` fields."""
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            records.append(
                EvalRecord(
                    id=str(obj["id"]),
                    gt=SegmentSet.from_pairs(obj["gt"]),
                    pred=SegmentSet.from_pairs(obj["pred"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"bad record on line {lineno}: {exc}") from exc
    return records


def per_record_csv(records: Sequence[EvalRecord], thresholds: Sequence[float] = F1_THRESHOLDS) -> str:
    """CSV of per-record scores: IoU of first segments plus F1 at each threshold."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "iou"] + [f"f1@{tau:g}" for tau in thresholds])
    for rec in records:
        g = rec.gt.segments[0] if rec.gt else None
        p = rec.pred.segments[0] if rec.pred else None
        iou = interval_iou(g, p) if g is not None and p is not None else 0.0
        row = [rec.id, f"{iou:.6f}"]
        row += [f"{f1_at_threshold(rec.gt, rec.pred, tau):.6f}" for tau in thresholds]
        writer.writerow(row)
    return buf.getvalue()
