"""Training-signal construction from refined windows and moment labels.

Two targets come out of here: a per-window regression target (the best
IoU the window reaches against any labeled moment) and a clip-level
agreement matrix that says, for every pair of clips, whether some
labeled moment covers both. Clip membership is decided by the clip's
center: clip c spans [c / r, (c + 1) / r) and its center (c + 0.5) / r
must lie inside the moment (both ends inclusive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .intervals import Interval, tiou_matrix

__all__ = [
    "max_tiou_targets",
    "clip_agreement_matrix",
    "SupervisionTargets",
    "supervision_targets",
]


def max_tiou_targets(preds: Sequence[Interval], gts: Sequence[Interval]) -> np.ndarray:
    """Best achievable IoU per predicted window.

    Args:
        preds: predicted windows (ScoredInterval accepted); may be empty,
            giving an empty vector.
        gts: labeled moments; must be non-empty.

    Returns:
        float64 vector of length len(preds), each entry in [0, 1].
    """
    if len(gts) == 0:
        raise ValueError("max_tiou_targets: gts is empty")
    if len(preds) == 0:
        return np.zeros(0, dtype=np.float64)
    return tiou_matrix(preds, gts).max(axis=1)


def clip_agreement_matrix(num_clips: int, r: float, gts: Sequence[Interval]) -> np.ndarray:
    """Pairwise clip co-membership under the labeled moments.

    Entry [c1, c2] is 1 when some single moment contains the centers of
    both clips, else 0. The matrix is symmetric, and its diagonal is 1
    exactly on clips covered by at least one moment.
    """
    if num_clips < 1:
        raise ValueError(f"num_clips must be >= 1, got {num_clips}")
    if r <= 0.0 or not math.isfinite(r):
        raise ValueError(f"clip rate must be positive, got {r}")
    if len(gts) == 0:
        raise ValueError("clip_agreement_matrix: gts is empty")
    centers = (np.arange(num_clips, dtype=np.float64) + 0.5) / r
    agree = np.zeros((num_clips, num_clips), dtype=bool)
    for m in gts:
        inside = (centers >= m.start) & (centers <= m.end)
        agree |= inside[:, None] & inside[None, :]
    return agree.astype(np.int64)


@dataclass(frozen=True)
class SupervisionTargets:
    """Bundle of both training targets for one query."""

    max_tiou: np.ndarray
    agreement: np.ndarray


def supervision_targets(preds: Sequence[Interval], gts: Sequence[Interval], num_clips: int, r: float) -> SupervisionTargets:
    return SupervisionTargets(
        max_tiou=max_tiou_targets(preds, gts),
        agreement=clip_agreement_matrix(num_clips, r, gts),
    )
