"""Deterministic synthetic fixtures: annotations plus degraded predictions.

Randomness comes from SplitMix64, a tiny fully specified 64-bit mixing
generator, never from a platform RNG, so a seed produces the same files
on any machine (and a reimplementation in any language can reproduce
them). All integers are modulo 2**64:

    state <- state + 0x9E3779B97F4A7C15
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB
    output <- z XOR (z >> 31)

A double in [0, 1) takes the top 53 bits: (output >> 11) * 2**-53, and
uniform(lo, hi) is lo + (hi - lo) * u. The stream for query qid starts
from state mix(seed + qid * 0x9E3779B97F4A7C15), where mix is the z
transformation above, so queries can be generated independently and
sharding never changes the output.

Per query the draw order is fixed: duration; moment count; one length
per moment; one placement offset per moment; then per moment in start
order exactly four draws (drop gate, two jitter offsets, score); then
per spurious slot exactly five draws (gate, gap choice, length,
position, score). Draws happen even for dropped or skipped windows, so
one outcome never shifts the rest of the stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .dataset import GroundTruthEntry, PredictionEntry
from .intervals import Interval, ScoredInterval, coalesce

__all__ = ["SynthConfig", "SplitMix64", "generate"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """The fixture generator's only randomness source; see module docs."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        return _mix64(self.state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0 ** -53
        return lo + (hi - lo) * u

    def weighted_index(self, weights) -> int:
        u = self.uniform() * math.fsum(weights)
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                return i
        return len(weights) - 1


@dataclass(frozen=True)
class SynthConfig:
    """Shape of the generated corpus and of the prediction noise.

    Moments per query are drawn from ``moment_count_weights`` (index i
    carries count i + 1). Predictions start from the true moments:
    each survives with probability 1 - drop_prob and gets both
    endpoints jittered by uniform(-jitter, +jitter); each of
    ``max_spurious`` slots (default: the moment count) then adds a
    distractor window with probability spurious_prob, placed in a gap
    so it overlaps no true moment. True windows score inside
    ``true_score_range`` and distractors inside ``spurious_score_range``,
    which must sit at or below it, so genuine matches always outrank
    noise.
    """

    seed: int = 42
    num_queries: int = 100
    duration_range: tuple[float, float] = (120.0, 240.0)
    moment_count_weights: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    moment_len_range: tuple[float, float] = (2.0, 20.0)
    jitter: float = 1.0
    drop_prob: float = 0.1
    spurious_prob: float = 0.3
    max_spurious: Optional[int] = None
    true_score_range: tuple[float, float] = (0.6, 1.0)
    spurious_score_range: tuple[float, float] = (0.0, 0.4)
    queries_per_video: int = 2

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        if self.num_queries < 1:
            raise ValueError(f"num_queries must be >= 1, got {self.num_queries}")
        for name in ("duration_range", "moment_len_range", "true_score_range", "spurious_score_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"{name} must be an ordered finite pair, got ({lo}, {hi})")
        if self.duration_range[0] <= 0.0 or self.moment_len_range[0] < 0.0:
            raise ValueError("durations must be positive and moment lengths non-negative")
        if not self.moment_count_weights or len(self.moment_count_weights) > 6:
            raise ValueError("moment_count_weights must cover counts 1..6 at most")
        if any(w < 0 for w in self.moment_count_weights) or math.fsum(self.moment_count_weights) <= 0:
            raise ValueError("moment_count_weights must be non-negative with a positive sum")
        for name in ("drop_prob", "spurious_prob"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.jitter < 0.0 or not math.isfinite(self.jitter):
            raise ValueError(f"jitter must be non-negative, got {self.jitter}")
        if self.spurious_score_range[1] > self.true_score_range[0]:
            raise ValueError("spurious scores must not exceed true-match scores")
        if self.max_spurious is not None and self.max_spurious < 0:
            raise ValueError(f"max_spurious must be >= 0, got {self.max_spurious}")
        if self.queries_per_video < 1:
            raise ValueError(f"queries_per_video must be >= 1, got {self.queries_per_video}")


def _place_moments(rng: SplitMix64, duration: float, count: int, len_range) -> list[Interval]:
    lengths = [rng.uniform(*len_range) for _ in range(count)]
    free = duration - math.fsum(lengths)
    if free < 0.0:
        raise ValueError(
            f"cannot place {count} moments totalling {math.fsum(lengths):.1f} s in a {duration:.1f} s video"
        )
    offsets = sorted(rng.uniform(0.0, free) for _ in range(count))
    moments = []
    consumed = 0.0
    for off, ln in zip(offsets, lengths):
        start = off + consumed
        end = min(start + ln, duration)
        moments.append(Interval(start, end))
        consumed += ln
    return moments


def _gaps(duration: float, moments) -> list[tuple[float, float]]:
    merged = coalesce(moments)
    gaps = []
    cursor = 0.0
    for m in merged:
        if m.start > cursor:
            gaps.append((cursor, m.start))
        cursor = m.end
    if cursor < duration:
        gaps.append((cursor, duration))
    return gaps


def generate(config: SynthConfig) -> tuple[list[GroundTruthEntry], list[PredictionEntry]]:
    """Build a (ground truth, predictions) pair from the config.

    Qids run from 1 to num_queries, every query text is a fixed
    placeholder, and consecutive queries share a video id in groups of
    ``queries_per_video``.

    Raises:
        ValueError: when a draw asks for more moment time than the
            video holds (infeasible packing).
    """
    gt_entries = []
    pred_entries = []
    for qid in range(1, config.num_queries + 1):
        rng = SplitMix64(_mix64(config.seed + qid * _GOLDEN))
        duration = rng.uniform(*config.duration_range)
        count = rng.weighted_index(config.moment_count_weights) + 1
        moments = _place_moments(rng, duration, count, config.moment_len_range)

        windows: list[tuple[float, float, float]] = []
        for m in moments:
            u_drop = rng.uniform()
            d1 = rng.uniform(-config.jitter, config.jitter)
            d2 = rng.uniform(-config.jitter, config.jitter)
            score = rng.uniform(*config.true_score_range)
            if u_drop < config.drop_prob:
                continue
            s = min(max(m.start + d1, 0.0), duration)
            e = min(max(m.end + d2, 0.0), duration)
            if s > e:
                s, e = e, s
            windows.append((s, e, score))

        slots = config.max_spurious if config.max_spurious is not None else count
        gaps = _gaps(duration, moments)
        for _ in range(slots):
            u_gate = rng.uniform()
            u_gap = rng.uniform()
            ln = rng.uniform(*config.moment_len_range)
            u_pos = rng.uniform()
            score = rng.uniform(*config.spurious_score_range)
            if u_gate >= config.spurious_prob or not gaps:
                continue
            gs, ge = gaps[int(u_gap * len(gaps))]
            width = min(ln, ge - gs)
            start = gs + u_pos * ((ge - gs) - width)
            windows.append((start, start + width, score))

        order = sorted(range(len(windows)), key=lambda i: (-windows[i][2], windows[i][0], i))
        ranked = tuple(ScoredInterval(Interval(s, e), sc) for s, e, sc in (windows[i] for i in order))

        gt_entries.append(GroundTruthEntry(
            qid=qid,
            query=f"placeholder query text for item {qid}",
            vid=f"synth_video_{(qid - 1) // config.queries_per_video:06d}",
            duration=duration,
            moments=tuple(moments),
        ))
        pred_entries.append(PredictionEntry(qid=qid, windows=ranked, input_order_differed=False))
    return gt_entries, pred_entries
