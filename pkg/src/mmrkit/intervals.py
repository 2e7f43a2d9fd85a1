"""Temporal interval primitives: IoU, cross IoU matrices, coalescing, NMS.

All arithmetic here is plain double precision with exact comparisons;
no epsilon tolerances are applied anywhere, so results are reproducible
bit for bit across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Interval",
    "ScoredInterval",
    "iou",
    "tiou_matrix",
    "coalesce",
    "set_iou",
    "nms",
]


@dataclass(frozen=True, slots=True)
class Interval:
    """A temporal span in seconds with 0 <= start <= end.

    Zero-length spans are legal on input (annotation files contain
    them); by convention their IoU against anything, including an
    identical zero-length span, is 0.
    """

    start: float
    end: float

    def __post_init__(self) -> None:
        s = float(self.start)
        e = float(self.end)
        if not (math.isfinite(s) and math.isfinite(e)):
            raise ValueError(f"interval endpoints must be finite, got [{self.start}, {self.end}]")
        if s < 0.0 or s > e:
            raise ValueError(f"interval must satisfy 0 <= start <= end, got [{s}, {e}]")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class ScoredInterval:
    """An interval with a finite confidence score attached."""

    interval: Interval
    score: float

    def __post_init__(self) -> None:
        sc = float(self.score)
        if not math.isfinite(sc):
            raise ValueError(f"score must be finite, got {self.score}")
        object.__setattr__(self, "score", sc)

    @property
    def start(self) -> float:
        return self.interval.start

    @property
    def end(self) -> float:
        return self.interval.end


def iou(a: Interval, b: Interval) -> float:
    """Temporal intersection-over-union of two intervals.

    Returns |a & b| / |a | b|, and 0 when the union has measure zero.
    The value is symmetric in its arguments and lies in [0, 1].
    """
    inter = min(a.end, b.end) - max(a.start, b.start)
    if inter < 0.0:
        inter = 0.0
    union = (a.end - a.start) + (b.end - b.start) - inter
    return inter / union if union > 0.0 else 0.0


def tiou_matrix(preds: Sequence[Interval], gts: Sequence[Interval]) -> np.ndarray:
    """Pairwise IoU between two interval collections.

    Args:
        preds: candidate intervals, one matrix row each. ScoredInterval
            items are accepted and read through to their interval.
        gts: reference intervals, one matrix column each.

    Returns:
        float64 array of shape (len(preds), len(gts)).

    Raises:
        ValueError: when either side is empty, naming which one.
    """
    if len(preds) == 0:
        raise ValueError("tiou_matrix: preds is empty")
    if len(gts) == 0:
        raise ValueError("tiou_matrix: gts is empty")
    p = np.asarray([(_span(x)) for x in preds], dtype=np.float64)
    g = np.asarray([(_span(x)) for x in gts], dtype=np.float64)
    ps, pe = p[:, 0:1], p[:, 1:2]
    gs, ge = g[None, :, 0], g[None, :, 1]
    inter = np.clip(np.minimum(pe, ge) - np.maximum(ps, gs), 0.0, None)
    union = (pe - ps) + (ge - gs) - inter
    out = np.zeros_like(inter)
    np.divide(inter, union, out=out, where=union > 0.0)
    return out


def _span(x) -> tuple[float, float]:
    if isinstance(x, ScoredInterval):
        return (x.interval.start, x.interval.end)
    return (x.start, x.end)


def coalesce(spans: Iterable[Interval]) -> list[Interval]:
    """Merge overlapping and touching intervals into a sorted disjoint set.

    Touching counts as mergeable: [0, 2] and [2, 4] coalesce to [0, 4].
    The result is sorted by start and pairwise disjoint with no shared
    endpoints.
    """
    items = sorted(spans, key=lambda s: (s.start, s.end))
    merged: list[Interval] = []
    for span in items:
        if merged and span.start <= merged[-1].end:
            last = merged[-1]
            if span.end > last.end:
                merged[-1] = Interval(last.start, span.end)
        else:
            merged.append(span)
    return merged


def set_iou(a: Iterable[Interval], b: Iterable[Interval]) -> float:
    """IoU between two interval unions.

    Both sides are coalesced first, so double-covered time counts once.
    Used by the annotation consistency comparator. Empty-against-empty
    (or zero total measure) gives 0.
    """
    ca = coalesce(a)
    cb = coalesce(b)
    inter = 0.0
    i = j = 0
    while i < len(ca) and j < len(cb):
        lo = max(ca[i].start, cb[j].start)
        hi = min(ca[i].end, cb[j].end)
        if hi > lo:
            inter += hi - lo
        if ca[i].end <= cb[j].end:
            i += 1
        else:
            j += 1
    union = sum(s.length for s in ca) + sum(s.length for s in cb) - inter
    return inter / union if union > 0.0 else 0.0


def nms(preds: Sequence[ScoredInterval], threshold: float) -> list[ScoredInterval]:
    """Greedy temporal non-maximum suppression.

    Repeatedly keeps the highest-scoring remaining window and drops
    every remaining window whose IoU with it is strictly greater than
    ``threshold``. Score ties are broken toward the earlier start, then
    the earlier input position, so the outcome does not depend on how
    the caller happened to sort the list.

    Args:
        preds: scored windows in any order.
        threshold: suppression IoU in (0, 1].

    Returns:
        Kept windows in descending score order.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"nms threshold must be in (0, 1], got {threshold}")
    order = sorted(range(len(preds)), key=lambda i: (-preds[i].score, preds[i].start, i))
    alive = [preds[i] for i in order]
    kept: list[ScoredInterval] = []
    while alive:
        head = alive.pop(0)
        kept.append(head)
        alive = [p for p in alive if iou(head.interval, p.interval) <= threshold]
    return kept
