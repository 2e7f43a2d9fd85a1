"""Ranked matching and retrieval metrics for multi-moment queries.

The headline number is G-mAP: per-query average precision is computed at
each IoU threshold in a sweep, averaged over queries at fixed threshold,
then averaged over the sweep. Alongside it the report carries per
moment-count category breakdowns, mIoU@k (mean top-k best IoU), and
mR@k (fraction of moments recalled within a top-k budget).

Conventions baked in here:

  * AP is computed per query and averaged over queries, detection style.
  * A prediction consumes the unmatched ground-truth moment with the
    highest IoU, provided that IoU meets the threshold; matching is
    strictly one-to-one. IoU ties are settled toward the moment with
    the earlier start, then the earlier end, then the lower index, so
    reordering a query's moments cannot change any reported value.
  * mIoU@k and mR@k only consider queries with at least k ground-truth
    moments, and their top-k terms place no one-to-one constraint.
  * Every mean over queries is computed with exact summation
    (math.fsum), which makes each reported value independent of query
    order and of the worker count used to compute it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .intervals import Interval, ScoredInterval

__all__ = [
    "DEFAULT_IOU_THRESHOLDS",
    "DEFAULT_CATEGORIES",
    "MetricConfig",
    "MatchResult",
    "MetricReport",
    "match_greedy",
    "average_precision",
    "ap_by_tau",
    "g_map",
    "map_by_category",
    "miou_at_k",
    "mr_at_k",
    "mr_at_k_by_tau",
    "evaluate",
]

DEFAULT_IOU_THRESHOLDS = (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)

# label, smallest moment count, largest moment count (None = unbounded)
DEFAULT_CATEGORIES = (("1_tgt", 1, 1), ("2_tgt", 2, 2), ("3+tgt", 3, None))

_AP_MODES = ("exact-envelope", "eleven-point")


def _check_thresholds(name: str, values: Sequence[float]) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ValueError(f"{name} must not be empty")
    for v in vals:
        if not (0.0 < v <= 1.0) or not math.isfinite(v):
            raise ValueError(f"{name} must lie in (0, 1], got {v}")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"{name} must be strictly increasing, got {vals}")
    return vals


@dataclass(frozen=True)
class MetricConfig:
    """Threshold sweeps, top-k budgets, categories, and the AP flavor.

    ``categories`` partitions queries by ground-truth moment count into
    labeled bins; the bins must tile 1, 2, 3, ... with no gaps and end
    in one open bin. ``ap_mode`` selects the exact precision-envelope
    integral (default) or the historical eleven-point interpolation.
    """

    iou_thresholds: tuple[float, ...] = DEFAULT_IOU_THRESHOLDS
    recall_thresholds: tuple[float, ...] = DEFAULT_IOU_THRESHOLDS
    k_values: tuple[int, ...] = (1, 2, 3)
    categories: tuple[tuple[str, int, Optional[int]], ...] = DEFAULT_CATEGORIES
    ap_mode: str = "exact-envelope"

    def __post_init__(self) -> None:
        object.__setattr__(self, "iou_thresholds", _check_thresholds("iou_thresholds", self.iou_thresholds))
        object.__setattr__(self, "recall_thresholds", _check_thresholds("recall_thresholds", self.recall_thresholds))
        ks = tuple(int(k) for k in self.k_values)
        if not ks or any(k < 1 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError(f"k_values must be strictly increasing positive integers, got {self.k_values}")
        object.__setattr__(self, "k_values", ks)
        if self.ap_mode not in _AP_MODES:
            raise ValueError(f"ap_mode must be one of {_AP_MODES}, got {self.ap_mode!r}")
        cats = tuple((str(label), int(lo), None if hi is None else int(hi)) for label, lo, hi in self.categories)
        if not cats:
            raise ValueError("categories must not be empty")
        labels = [c[0] for c in cats]
        if len(set(labels)) != len(labels):
            raise ValueError(f"category labels must be unique, got {labels}")
        ordered = sorted(cats, key=lambda c: c[1])
        expect = 1
        for label, lo, hi in ordered:
            if lo != expect:
                raise ValueError(f"categories must tile all counts >= 1 with no gaps; {label!r} starts at {lo}, expected {expect}")
            if hi is None:
                if (label, lo, hi) != ordered[-1]:
                    raise ValueError("only the last category may be open-ended")
                expect = None
            else:
                if hi < lo:
                    raise ValueError(f"category {label!r} has max below min")
                expect = hi + 1
        if expect is not None:
            raise ValueError("the last category must be open-ended (max None)")
        object.__setattr__(self, "categories", cats)

    def category_of(self, num_gt: int) -> str:
        for label, lo, hi in self.categories:
            if lo <= num_gt and (hi is None or num_gt <= hi):
                return label
        raise ValueError(f"no category covers a moment count of {num_gt}")

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "MetricConfig":
        """Build a config from a plain dict, e.g. parsed CLI or JSON input."""
        kwargs = {}
        if "iou_thresholds" in mapping:
            kwargs["iou_thresholds"] = tuple(mapping["iou_thresholds"])
        if "recall_thresholds" in mapping:
            kwargs["recall_thresholds"] = tuple(mapping["recall_thresholds"])
        if "k_values" in mapping:
            kwargs["k_values"] = tuple(mapping["k_values"])
        if "ap_mode" in mapping:
            kwargs["ap_mode"] = mapping["ap_mode"]
        if "categories" in mapping:
            cats = []
            for c in mapping["categories"]:
                if isinstance(c, Mapping):
                    cats.append((c["label"], c["min_gt"], c.get("max_gt")))
                else:
                    cats.append(tuple(c))
            kwargs["categories"] = tuple(cats)
        unknown = set(mapping) - {"iou_thresholds", "recall_thresholds", "k_values", "ap_mode", "categories"}
        if unknown:
            raise ValueError(f"unknown metric config keys: {sorted(unknown)}")
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "iou_thresholds": list(self.iou_thresholds),
            "recall_thresholds": list(self.recall_thresholds),
            "k_values": list(self.k_values),
            "categories": [
                {"label": label, "min_gt": lo, "max_gt": hi} for label, lo, hi in self.categories
            ],
            "ap_mode": self.ap_mode,
        }


@dataclass(frozen=True)
class MatchResult:
    """Outcome of greedy matching, aligned to rank order.

    ``tp[i]`` says whether the i-th ranked prediction matched;
    ``matched_gt_index[i]`` is the consumed moment's index (None for a
    false positive) and ``matched_iou[i]`` the IoU it matched at (0.0
    for a false positive).
    """

    tp: tuple[bool, ...]
    matched_gt_index: tuple[Optional[int], ...]
    matched_iou: tuple[float, ...]
    num_gt: int


# ---------------------------------------------------------------------------
# per-query core
#
# Everything below works on plain (start, end) tuples and floats. The
# public wrappers and evaluate() all route through these helpers, so a
# number computed by a standalone op is bit-identical to the same number
# inside a full report.
# ---------------------------------------------------------------------------


def _rank_order(preds: Sequence[ScoredInterval]) -> list[int]:
    return sorted(range(len(preds)), key=lambda i: (-preds[i].score, preds[i].interval.start, i))


def _prep_pair(preds: Sequence[ScoredInterval], gts: Sequence[Interval], where: str = "") -> tuple[list, list]:
    if len(gts) == 0:
        raise ValueError(f"ground-truth moments must not be empty{where}")
    spans = [(p.interval.start, p.interval.end) for p in preds]
    ranked = [spans[i] for i in _rank_order(preds)]
    return ranked, [(g.start, g.end) for g in gts]


def _iou_rows(pred_spans: Sequence[tuple], gt_spans: Sequence[tuple]) -> list[list[float]]:
    rows = []
    for ps, pe in pred_spans:
        plen = pe - ps
        row = []
        for gs, ge in gt_spans:
            lo = ps if ps > gs else gs
            hi = pe if pe < ge else ge
            inter = hi - lo
            if inter <= 0.0:
                row.append(0.0)
            else:
                union = plen + (ge - gs) - inter
                row.append(inter / union if union > 0.0 else 0.0)
        rows.append(row)
    return rows


def _candidate_orders(iou_rows: list[list[float]], gt_spans: Sequence[tuple]) -> list[list[int]]:
    # per prediction: moments by descending IoU, ties to the earlier
    # (start, end) pair, then the lower index
    g = len(gt_spans)
    idx = range(g)
    return [
        sorted(idx, key=lambda j, row=row: (-row[j], gt_spans[j][0], gt_spans[j][1], j))
        for row in iou_rows
    ]


def _greedy_flags(iou_rows: list[list[float]], orders: list[list[int]], tau: float, used: list[bool]) -> list[bool]:
    # used must come in all-False and is consumed by this call
    flags = []
    for row, order in zip(iou_rows, orders):
        hit = False
        for j in order:
            if row[j] < tau:
                break  # sorted descending: nothing further can match
            if not used[j]:
                used[j] = True
                hit = True
                break
        flags.append(hit)
    return flags


def _ap_from_flags(flags: Sequence[bool], num_gt: int, mode: str) -> float:
    n = len(flags)
    if n == 0 or num_gt <= 0:
        return 0.0
    prec = [0.0] * n
    tp = 0
    for i, f in enumerate(flags):
        if f:
            tp += 1
        prec[i] = tp / (i + 1)
    if tp == 0:
        return 0.0
    if mode == "eleven-point":
        recall = [0.0] * n
        tp = 0
        for i, f in enumerate(flags):
            if f:
                tp += 1
            recall[i] = tp / num_gt
        total = 0.0
        for level in range(11):
            r = level / 10
            best = 0.0
            for p, rec in zip(prec, recall):
                if rec >= r and p > best:
                    best = p
            total += best
        return total / 11
    # exact envelope: walk backward keeping the best precision seen so
    # far; each true positive banks that envelope value for its recall step
    best = 0.0
    total = 0.0
    for i in range(n - 1, -1, -1):
        p = prec[i]
        if p > best:
            best = p
        if flags[i]:
            total += best
    return total / num_gt


class _QueryScore:
    """Per-query metric fragments, ready for exact-sum aggregation."""

    __slots__ = ("num_gt", "num_preds", "aps", "miou", "recall")

    def __init__(self, num_gt, num_preds, aps, miou, recall):
        self.num_gt = num_gt
        self.num_preds = num_preds
        self.aps = aps          # one AP per iou threshold
        self.miou = miou        # k -> query mIoU@k, eligible ks only
        self.recall = recall    # k -> tuple of recalled fractions per recall threshold


def _score_query(pred_spans, gt_spans, taus, rtaus, ks, ap_mode) -> _QueryScore:
    n = len(pred_spans)
    g = len(gt_spans)
    iou_rows = _iou_rows(pred_spans, gt_spans)
    orders = _candidate_orders(iou_rows, gt_spans)

    aps = []
    for tau in taus:
        flags = _greedy_flags(iou_rows, orders, tau, [False] * g)
        aps.append(_ap_from_flags(flags, g, ap_mode))

    row_max = [max(row) for row in iou_rows]
    miou = {}
    recall = {}
    col_best = [0.0] * g
    rows_in = 0
    for k in ks:
        if g < k:
            break  # ks ascend, nothing larger is eligible either
        while rows_in < k and rows_in < n:
            row = iou_rows[rows_in]
            for j in range(g):
                if row[j] > col_best[j]:
                    col_best[j] = row[j]
            rows_in += 1
        miou[k] = math.fsum(row_max[:k]) / k
        recall[k] = tuple(sum(1 for b in col_best if b >= tau) / g for tau in rtaus)
    return _QueryScore(g, n, aps, miou, recall)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def match_greedy(preds: Sequence[ScoredInterval], gts: Sequence[Interval], tau: float) -> MatchResult:
    """Match ranked predictions to moments one-to-one at threshold tau.

    Predictions are (re)ranked here by descending score, ties to the
    earlier start then input order, so callers need not pre-sort. Each
    prediction takes the unmatched moment with the highest IoU when that
    IoU is at least ``tau``; otherwise it is a false positive.

    Returns:
        MatchResult with per-prediction fields in rank order.
    """
    if not (0.0 < tau <= 1.0):
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    pred_spans, gt_spans = _prep_pair(preds, gts)
    iou_rows = _iou_rows(pred_spans, gt_spans)
    orders = _candidate_orders(iou_rows, gt_spans)
    used = [False] * len(gt_spans)
    tp = []
    matched_j: list[Optional[int]] = []
    matched_v = []
    for row, order in zip(iou_rows, orders):
        hit_j = None
        for j in order:
            if row[j] < tau:
                break
            if not used[j]:
                used[j] = True
                hit_j = j
                break
        tp.append(hit_j is not None)
        matched_j.append(hit_j)
        matched_v.append(row[hit_j] if hit_j is not None else 0.0)
    return MatchResult(tuple(tp), tuple(matched_j), tuple(matched_v), len(gt_spans))


def greedy_assign(iou_rows: Sequence[Sequence[float]], tau: float) -> list[int]:
    """Row-order greedy assignment on a plain IoU matrix.

    Rows are taken top to bottom, each claiming its best still-unclaimed
    column at or above ``tau``, ties to the lower column index. Returns
    the claimed column per row, -1 where nothing qualifies. This is the
    matrix form of ``match_greedy``, which ranks by score first and
    breaks column ties by moment position.
    """
    if not (0.0 < tau <= 1.0):
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    widths = {len(r) for r in iou_rows}
    if len(widths) > 1:
        raise ValueError("iou_rows must be rectangular")
    used = [False] * (widths.pop() if widths else 0)
    out = []
    for row in iou_rows:
        pick = -1
        best = -1.0
        for j, v in enumerate(row):
            if v >= tau and not used[j] and v > best:
                best = v
                pick = j
        if pick >= 0:
            used[pick] = True
        out.append(pick)
    return out


def average_precision(match: MatchResult, mode: str = "exact-envelope") -> float:
    """AP of one query from its matching outcome.

    ``exact-envelope`` integrates the interpolated precision envelope
    over recall exactly; ``eleven-point`` averages envelope precision at
    recall levels 0.0, 0.1, ..., 1.0. Recall is counted against all
    ground-truth moments, so unmatched moments push AP down. A query
    with no predictions scores 0.
    """
    if mode not in _AP_MODES:
        raise ValueError(f"mode must be one of {_AP_MODES}, got {mode!r}")
    return _ap_from_flags(match.tp, match.num_gt, mode)


Dataset = Sequence[tuple[Sequence[ScoredInterval], Sequence[Interval]]]


def _scored_dataset(dataset: Dataset, config: MetricConfig) -> list[_QueryScore]:
    if len(dataset) == 0:
        raise ValueError("dataset must contain at least one query")
    out = []
    for i, (preds, gts) in enumerate(dataset):
        pred_spans, gt_spans = _prep_pair(preds, gts, where=f" (query at position {i})")
        out.append(_score_query(pred_spans, gt_spans, config.iou_thresholds,
                                config.recall_thresholds, config.k_values, config.ap_mode))
    return out


def ap_by_tau(dataset: Dataset, config: MetricConfig | None = None) -> dict[float, float]:
    """Mean per-query AP at each IoU threshold in the sweep."""
    config = config or MetricConfig()
    scores = _scored_dataset(dataset, config)
    n = len(scores)
    return {
        tau: math.fsum(s.aps[t] for s in scores) / n
        for t, tau in enumerate(config.iou_thresholds)
    }


def g_map(dataset: Dataset, config: MetricConfig | None = None) -> float:
    """Grand mean AP: average the per-threshold means over the sweep."""
    config = config or MetricConfig()
    per_tau = ap_by_tau(dataset, config)
    return math.fsum(per_tau.values()) / len(per_tau)


def map_by_category(dataset: Dataset, config: MetricConfig | None = None) -> dict[str, float]:
    """G-mAP within each moment-count category; empty categories are omitted."""
    config = config or MetricConfig()
    out = {}
    for label, lo, hi in config.categories:
        subset = [
            pair for pair in dataset
            if lo <= len(pair[1]) and (hi is None or len(pair[1]) <= hi)
        ]
        if subset:
            out[label] = g_map(subset, config)
    return out


def miou_at_k(dataset: Dataset, k: int) -> Optional[float]:
    """Mean top-k best-IoU over queries with at least k moments.

    Each of the k rank slots contributes its prediction's maximum IoU
    against the query's full moment set; queries with fewer than k
    predictions contribute 0 for the missing slots. Returns None when no
    query is eligible (never 0.0, which would be a real score).
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    vals = []
    for i, (preds, gts) in enumerate(dataset):
        if len(gts) < k:
            continue
        pred_spans, gt_spans = _prep_pair(preds, gts, where=f" (query at position {i})")
        rows = _iou_rows(pred_spans[:k], gt_spans)
        vals.append(math.fsum(max(row) for row in rows) / k)
    if not vals:
        return None
    return math.fsum(vals) / len(vals)


def mr_at_k_by_tau(dataset: Dataset, k: int, config: MetricConfig | None = None) -> Optional[dict[float, float]]:
    """Per-threshold mean fraction of moments recalled within top k.

    A moment counts as recalled at tau when some top-k prediction
    reaches IoU >= tau with it. Only queries with at least k moments
    participate; returns None when none do.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    config = config or MetricConfig()
    rows_per_query = []
    for i, (preds, gts) in enumerate(dataset):
        if len(gts) < k:
            continue
        pred_spans, gt_spans = _prep_pair(preds, gts, where=f" (query at position {i})")
        rows = _iou_rows(pred_spans[:k], gt_spans)
        col_best = [max((row[j] for row in rows), default=0.0) for j in range(len(gt_spans))]
        rows_per_query.append(col_best)
    if not rows_per_query:
        return None
    out = {}
    for tau in config.recall_thresholds:
        vals = [sum(1 for b in col_best if b >= tau) / len(col_best) for col_best in rows_per_query]
        out[tau] = math.fsum(vals) / len(vals)
    return out


def mr_at_k(dataset: Dataset, k: int, config: MetricConfig | None = None) -> Optional[float]:
    """Mean of mr_at_k_by_tau over the recall-threshold sweep."""
    config = config or MetricConfig()
    per_tau = mr_at_k_by_tau(dataset, k, config)
    if per_tau is None:
        return None
    return math.fsum(per_tau.values()) / len(per_tau)


@dataclass(frozen=True)
class MetricReport:
    """Full evaluation output, raw values in [0, 1].

    ``miou_at_k`` / ``mr_at_k`` omit a k entirely when no query has k
    moments; ``eligible_query_counts`` still records the zero. The
    config that produced the numbers rides along so a report is
    self-describing.
    """

    num_queries: int
    num_predictions: int
    queries_without_predictions: int
    g_map: float
    ap_by_tau: dict[float, float]
    map_by_category: dict[str, float]
    query_counts: dict[str, int]
    miou_at_k: dict[int, float]
    mr_at_k: dict[int, float]
    mr_by_tau: dict[int, dict[float, float]]
    eligible_query_counts: dict[int, int]
    config: MetricConfig = field(compare=False)

    def to_dict(self) -> dict:
        """Canonically ordered plain mapping, ready for serialization.

        Threshold keys become their shortest round-trip decimal form;
        k keys become decimal strings.
        """
        return {
            "num_queries": self.num_queries,
            "num_predictions": self.num_predictions,
            "queries_without_predictions": self.queries_without_predictions,
            "g_map": self.g_map,
            "ap_by_tau": {repr(t): v for t, v in self.ap_by_tau.items()},
            "map_by_category": dict(self.map_by_category),
            "query_counts": dict(self.query_counts),
            "miou_at_k": {str(k): v for k, v in self.miou_at_k.items()},
            "mr_at_k": {str(k): v for k, v in self.mr_at_k.items()},
            "mr_by_tau": {str(k): {repr(t): v for t, v in per.items()} for k, per in self.mr_by_tau.items()},
            "eligible_query_counts": {str(k): v for k, v in self.eligible_query_counts.items()},
            "config": self.config.to_dict(),
        }


def evaluate(gt_entries, pred_entries, config: MetricConfig | None = None, workers: int = 1) -> MetricReport:
    """Join annotations with predictions by qid and build a full report.

    Args:
        gt_entries: objects with qid, moments (loader output or
            equivalent). Duplicate qids are rejected.
        pred_entries: objects with qid, windows. Every qid must exist
            in the ground truth; a ground-truth qid with no prediction
            entry is scored against an empty ranked list and counted in
            ``queries_without_predictions``.
        config: metric configuration; defaults throughout.
        workers: per-query scoring may fan out over this many threads.
            The report is identical for any value, because aggregation
            uses exact sums in a canonical order.

    Returns:
        MetricReport with raw values in [0, 1].
    """
    config = config or MetricConfig()
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    gt_order = []
    gt_seen = set()
    for entry in gt_entries:
        if entry.qid in gt_seen:
            raise ValueError(f"duplicate qid in ground truth: {entry.qid}")
        gt_seen.add(entry.qid)
        gt_order.append(entry)
    if not gt_order:
        raise ValueError("ground truth contains no queries")

    preds_by_qid = {}
    num_predictions = 0
    for entry in pred_entries:
        if entry.qid in preds_by_qid:
            raise ValueError(f"duplicate qid in predictions: {entry.qid}")
        if entry.qid not in gt_seen:
            raise ValueError(f"unknown qid in predictions: {entry.qid}")
        preds_by_qid[entry.qid] = entry
        num_predictions += len(entry.windows)

    taus = config.iou_thresholds
    rtaus = config.recall_thresholds
    ks = config.k_values
    mode = config.ap_mode

    def one(entry):
        pred_entry = preds_by_qid.get(entry.qid)
        preds = pred_entry.windows if pred_entry is not None else ()
        pred_spans, gt_spans = _prep_pair(preds, entry.moments, where=f" (qid {entry.qid})")
        return _score_query(pred_spans, gt_spans, taus, rtaus, ks, mode)

    if workers == 1:
        scores = [one(e) for e in gt_order]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(one, gt_order))

    n = len(scores)
    missing = sum(1 for e in gt_order if e.qid not in preds_by_qid)

    ap_per_tau = {tau: math.fsum(s.aps[t] for s in scores) / n for t, tau in enumerate(taus)}
    grand = math.fsum(ap_per_tau.values()) / len(taus)

    query_counts = {label: 0 for label, _, _ in config.categories}
    by_cat: dict[str, list[_QueryScore]] = {label: [] for label, _, _ in config.categories}
    for s in scores:
        label = config.category_of(s.num_gt)
        query_counts[label] += 1
        by_cat[label].append(s)
    cat_map = {}
    for label, _, _ in config.categories:
        subset = by_cat[label]
        if subset:
            per_tau = [math.fsum(s.aps[t] for s in subset) / len(subset) for t in range(len(taus))]
            cat_map[label] = math.fsum(per_tau) / len(taus)

    miou = {}
    mr = {}
    mr_by_tau: dict[int, dict[float, float]] = {}
    eligible_counts = {}
    for k in ks:
        eligible = [s for s in scores if k in s.miou]
        eligible_counts[k] = len(eligible)
        if not eligible:
            continue
        miou[k] = math.fsum(s.miou[k] for s in eligible) / len(eligible)
        per_tau = {
            tau: math.fsum(s.recall[k][t] for s in eligible) / len(eligible)
            for t, tau in enumerate(rtaus)
        }
        mr_by_tau[k] = per_tau
        mr[k] = math.fsum(per_tau.values()) / len(rtaus)

    return MetricReport(
        num_queries=n,
        num_predictions=num_predictions,
        queries_without_predictions=missing,
        g_map=grand,
        ap_by_tau=ap_per_tau,
        map_by_category=cat_map,
        query_counts=query_counts,
        miou_at_k=miou,
        mr_at_k=mr,
        mr_by_tau=mr_by_tau,
        eligible_query_counts=eligible_counts,
        config=config,
    )
