"""Structured refinement of predicted windows onto a clip grid.

Models emit windows in continuous seconds; downstream feature pipelines
index clips extracted at a fixed rate r (clips per second, e.g. 0.5 for
one clip every two seconds). The pipeline here normalizes raw windows
so both views agree:

    swap reversed endpoints
    -> clamp into [0, clamp_to]
    -> round endpoints to the nearest grid multiple (ties round up)
    -> grow windows shorter than min_len symmetrically
    -> shrink windows longer than max_len symmetrically
    -> re-round

Length adjustments run in whole grid steps (an odd leftover step goes
to the later endpoint when growing and comes off the earlier one when
shrinking, matching ties-up rounding), so the output endpoints always
sit on the grid inside [0, clamp_to] and the whole pipeline is
idempotent. Growth that would cross a boundary is shifted inward, so
min_len is honored whenever the video is long enough; at the clamped
edges the achievable length may fall short by up to one grid step,
which is the documented tolerance. When no whole-step length fits
between min_len and max_len, the smallest length >= min_len wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .intervals import Interval, ScoredInterval

__all__ = [
    "PostProcessConfig",
    "postprocess",
    "clip_index_range",
    "blend_scores",
    "rerank_with_verification",
]


@dataclass(frozen=True)
class PostProcessConfig:
    """Refinement parameters for one video.

    Args:
        clamp_to: video duration in seconds; endpoints are confined to
            [0, clamp_to].
        clip_rate_r: clips per second of the feature grid.
        min_len: smallest admissible window, in seconds. Defaults to
            one clip (1 / clip_rate_r).
        max_len: largest admissible window; None means the duration.
        round_granularity: grid step for endpoint rounding. Defaults to
            one clip.
    """

    clamp_to: float
    clip_rate_r: float = 0.5
    min_len: Optional[float] = None
    max_len: Optional[float] = None
    round_granularity: Optional[float] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.clamp_to) or self.clamp_to <= 0.0:
            raise ValueError(f"clamp_to must be a positive duration, got {self.clamp_to}")
        if not math.isfinite(self.clip_rate_r) or self.clip_rate_r <= 0.0:
            raise ValueError(f"clip_rate_r must be positive, got {self.clip_rate_r}")
        if self.min_len is None:
            object.__setattr__(self, "min_len", 1.0 / self.clip_rate_r)
        if self.round_granularity is None:
            object.__setattr__(self, "round_granularity", 1.0 / self.clip_rate_r)
        if self.min_len <= 0.0 or not math.isfinite(self.min_len):
            raise ValueError(f"min_len must be positive, got {self.min_len}")
        if self.round_granularity <= 0.0 or not math.isfinite(self.round_granularity):
            raise ValueError(f"round_granularity must be positive, got {self.round_granularity}")
        if self.max_len is not None:
            if not math.isfinite(self.max_len) or self.max_len < self.min_len:
                raise ValueError(f"max_len must be >= min_len ({self.min_len}), got {self.max_len}")

    def to_dict(self) -> dict:
        return {
            "clamp_to": self.clamp_to,
            "clip_rate_r": self.clip_rate_r,
            "min_len": self.min_len,
            "max_len": self.max_len,
            "round_granularity": self.round_granularity,
        }


def _refine_span(s: float, e: float, cfg: PostProcessConfig) -> tuple[float, float]:
    if s > e:
        s, e = e, s
    dur = cfg.clamp_to
    if s < 0.0:
        s = 0.0
    elif s > dur:
        s = dur
    if e < 0.0:
        e = 0.0
    elif e > dur:
        e = dur

    g = cfg.round_granularity
    top = math.floor(dur / g)  # index of the last grid point inside the video

    def snap(x: float) -> int:
        # nearest grid index, ties up; never past the video end
        k = math.floor(x / g + 0.5)
        if k > top:
            k = math.floor(x / g)
        return k

    si = snap(s)
    ei = snap(e)

    kmin = math.ceil(cfg.min_len / g)
    max_len = dur if cfg.max_len is None else cfg.max_len
    kmax = math.floor(max_len / g)
    if kmax < kmin:
        kmax = kmin

    k = ei - si
    if k < kmin:
        need = kmin - k
        si -= need // 2
        ei += need - need // 2
        if si < 0:
            ei -= si  # shift right onto the grid origin
            si = 0
            if ei > top:
                ei = top
        elif ei > top:
            si -= ei - top  # shift left under the video end
            ei = top
            if si < 0:
                si = 0
    elif k > kmax:
        excess = k - kmax
        si += excess - excess // 2
        ei -= excess // 2
    return (si * g, ei * g)


def postprocess(preds: Sequence, cfg: PostProcessConfig) -> list[ScoredInterval]:
    """Refine raw windows onto the clip grid.

    Accepts ScoredInterval items or raw (start, end, score) triples;
    raw triples may arrive reversed or out of range, which is the whole
    point of the pipeline. Scores and list order pass through untouched.
    Applying the pipeline to its own output changes nothing.
    """
    out = []
    for item in preds:
        if isinstance(item, ScoredInterval):
            s, e, score = item.interval.start, item.interval.end, item.score
        else:
            s, e, score = item
            s = float(s)
            e = float(e)
            if not (math.isfinite(s) and math.isfinite(e)):
                raise ValueError(f"window endpoints must be finite, got [{s}, {e}]")
        rs, re_ = _refine_span(s, e, cfg)
        out.append(ScoredInterval(Interval(rs, re_), score))
    return out


def clip_index_range(interval: Interval, r: float, num_clips: int) -> tuple[int, int]:
    """Half-open clip index range [lo, hi) covered by an interval.

    lo is floor(start * r) and hi is ceil(end * r), clamped into
    [0, num_clips]. The result always covers at least one clip: a range
    that collapses (a zero-length moment sitting on a clip boundary) is
    widened by one clip toward the video interior.

    Raises:
        ValueError: when the interval lies entirely outside the grid.
    """
    if r <= 0.0 or not math.isfinite(r):
        raise ValueError(f"clip rate must be positive, got {r}")
    if num_clips < 1:
        raise ValueError(f"num_clips must be >= 1, got {num_clips}")
    lo = math.floor(interval.start * r)
    hi = math.ceil(interval.end * r)
    if lo >= num_clips:
        raise ValueError(
            f"interval [{interval.start}, {interval.end}] lies outside the clip grid (num_clips={num_clips})"
        )
    lo = max(lo, 0)
    hi = min(hi, num_clips)
    if hi == lo:
        hi += 1  # lo < num_clips is guaranteed by the bounds check above
    return (lo, hi)


def blend_scores(a: Sequence[float], b: Sequence[float], x: float) -> list[float]:
    """Elementwise convex blend x * a + (1 - x) * b."""
    if len(a) != len(b):
        raise ValueError(f"score sequences differ in length: {len(a)} vs {len(b)}")
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"blend weight must be in [0, 1], got {x}")
    out = []
    for i, (va, vb) in enumerate(zip(a, b)):
        va = float(va)
        vb = float(vb)
        if not (math.isfinite(va) and math.isfinite(vb)):
            raise ValueError(f"scores must be finite, got a[{i}]={va}, b[{i}]={vb}")
        out.append(x * va + (1.0 - x) * vb)
    return out


def rerank_with_verification(preds: Sequence[ScoredInterval], p: Sequence[float], weight: float) -> list[ScoredInterval]:
    """Fold per-window verification probabilities into the ranking.

    New scores are (1 - weight) * original + weight * p, and the list is
    re-sorted by the usual rank rule (score descending, ties to the
    earlier start then input order). weight 0 reproduces the input
    order and scores exactly.
    """
    if len(preds) != len(p):
        raise ValueError(f"verification scores differ in length: {len(preds)} vs {len(p)}")
    if not (0.0 <= weight <= 1.0):
        raise ValueError(f"weight must be in [0, 1], got {weight}")
    rescored = []
    for item, pv in zip(preds, p):
        pv = float(pv)
        if not math.isfinite(pv):
            raise ValueError(f"verification scores must be finite, got {pv}")
        rescored.append(ScoredInterval(item.interval, (1.0 - weight) * item.score + weight * pv))
    order = sorted(range(len(rescored)), key=lambda i: (-rescored[i].score, rescored[i].start, i))
    return [rescored[i] for i in order]
