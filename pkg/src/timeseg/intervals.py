"""Algebra over finite unions of closed time intervals, in seconds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

EPS = 1e-9


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval [start, end] in seconds. Zero length is allowed."""

    start: float
    end: float

    def __post_init__(self) -> None:
        start = float(self.start)
        end = float(self.end)
        if not (math.isfinite(start) and math.isfinite(end)):
            raise ValueError(f"interval endpoints must be finite: [{self.start}, {self.end}]")
        if start < 0 or end < 0:
            raise ValueError(f"interval endpoints must be non-negative: [{self.start}, {self.end}]")
        if end < start:
            raise ValueError(f"interval end < start: [{self.start}, {self.end}]")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class SegmentSet:
    """Ordered collection of intervals.

    Order and multiplicity are preserved exactly as given; segments may
    overlap. Measure-style operations canonicalize internally but never
    rewrite the stored list.
    """

    segments: tuple[TimeInterval, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> SegmentSet:
        return cls(tuple(TimeInterval(s, e) for s, e in pairs))

    def to_pairs(self) -> list[list[float]]:
        return [[seg.start, seg.end] for seg in self.segments]

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[TimeInterval]:
        return iter(self.segments)

    def __bool__(self) -> bool:
        return bool(self.segments)


def merged(segments: Iterable[TimeInterval]) -> list[TimeInterval]:
    """Canonical form: sorted, disjoint, with touching intervals fused."""
    ordered = sorted(segments, key=lambda seg: (seg.start, seg.end))
    out: list[TimeInterval] = []
    for seg in ordered:
        if out and seg.start <= out[-1].end + EPS:
            if seg.end > out[-1].end:
                out[-1] = TimeInterval(out[-1].start, seg.end)
        else:
            out.append(seg)
    return out


def measure(s: SegmentSet) -> float:
    """Total length of the union of all segments; overlap counted once."""
    return sum(seg.length for seg in merged(s.segments))


def intersection(a: SegmentSet, b: SegmentSet) -> SegmentSet:
    """Canonicalized set of points common to both unions."""
    left = merged(a.segments)
    right = merged(b.segments)
    out: list[TimeInterval] = []
    i = j = 0
    while i < len(left) and j < len(right):
        lo = max(left[i].start, right[j].start)
        hi = min(left[i].end, right[j].end)
        if lo <= hi:
            out.append(TimeInterval(lo, hi))
        if left[i].end < right[j].end:
            i += 1
        else:
            j += 1
    return SegmentSet(tuple(merged(out)))


def union(a: SegmentSet, b: SegmentSet) -> SegmentSet:
    """Canonicalized union of both segment sets."""
    return SegmentSet(tuple(merged((*a.segments, *b.segments))))


def span(a: TimeInterval, b: TimeInterval) -> TimeInterval:
    """Shortest single interval covering both inputs."""
    return TimeInterval(min(a.start, b.start), max(a.end, b.end))


def interval_intersection_length(a: TimeInterval, b: TimeInterval) -> float:
    return max(0.0, min(a.end, b.end) - max(a.start, b.start))
