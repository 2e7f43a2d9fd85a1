"""Formula-level reference implementations used as test oracles.

Everything in this file is written directly from the metric definitions,
with no concern for speed and no imports from the library under test.
Tests compare the package's optimized code paths against these plain
loops, so keep this module boring: nested loops, whole-list scans, and
builtin arithmetic only.

Data conventions: a prediction is a ``(start, end, score)`` triple, a
ground-truth moment is a ``(start, end)`` pair, and a dataset is a list
of ``(predictions, moments)`` pairs, one per query.
"""

from fractions import Fraction


def ref_iou(a, b):
    """Temporal intersection-over-union of two [start, end] spans.

    A union of measure zero (two coincident zero-length spans) gives 0.
    """
    inter = min(a[1], b[1]) - max(a[0], b[0])
    if inter < 0.0:
        inter = 0.0
    union = (a[1] - a[0]) + (b[1] - b[0]) - inter
    return inter / union if union > 0.0 else 0.0


def ref_rank(preds):
    """Indices of ``preds`` in rank order.

    Higher score first; score ties go to the earlier start, then to the
    original input position.
    """
    return sorted(range(len(preds)), key=lambda i: (-preds[i][2], preds[i][0], i))


def ref_match(preds, gts, tau):
    """Greedy one-to-one matching; returns TP flags in rank order.

    Each prediction, taken in rank order, is matched to the not yet
    consumed ground-truth moment with the highest IoU. Among equal IoUs
    the earlier start wins, then the earlier end, then the lower index.
    The match is a true positive when that IoU is at least ``tau``.
    """
    used = set()
    flags = []
    for i in ref_rank(preds):
        span = (preds[i][0], preds[i][1])
        best_key = None
        best_j = None
        for j, g in enumerate(gts):
            if j in used:
                continue
            v = ref_iou(span, g)
            key = (-v, g[0], g[1], j)
            if best_key is None or key < best_key:
                best_key = key
                best_j = j
        if best_j is not None and -best_key[0] >= tau:
            used.add(best_j)
            flags.append(True)
        else:
            flags.append(False)
    return flags


def ref_precisions(flags):
    prec = []
    tp = 0
    for i, f in enumerate(flags):
        if f:
            tp += 1
        prec.append(tp / (i + 1))
    return prec


def ref_ap(flags, num_gt):
    """All-point interpolated average precision.

    Recall steps up by 1/num_gt at every true positive; the precision
    credited at that step is the best precision seen at or after it.
    No predictions, or no true positives, gives 0.
    """
    if not flags or num_gt <= 0:
        return 0.0
    prec = ref_precisions(flags)
    total = 0.0
    for i, f in enumerate(flags):
        if f:
            total += max(prec[i:])
    return total / num_gt


def ref_ap_eleven_point(flags, num_gt):
    """Eleven-point interpolated AP over recall levels 0.0, 0.1, ..., 1.0."""
    if not flags or num_gt <= 0:
        return 0.0
    prec = ref_precisions(flags)
    tp = 0
    recall = []
    for f in flags:
        if f:
            tp += 1
        recall.append(tp / num_gt)
    total = 0.0
    for level in range(11):
        r = level / 10
        candidates = [p for p, rec in zip(prec, recall) if rec >= r]
        total += max(candidates) if candidates else 0.0
    return total / 11


def ref_ap_by_tau(dataset, taus, ap=ref_ap):
    """Mean over queries of per-query AP, one value per threshold."""
    out = {}
    for tau in taus:
        vals = [ap(ref_match(p, g, tau), len(g)) for p, g in dataset]
        out[tau] = sum(vals) / len(vals)
    return out


def ref_g_map(dataset, taus, ap=ref_ap):
    per_tau = ref_ap_by_tau(dataset, taus, ap)
    return sum(per_tau.values()) / len(per_tau)


def ref_map_by_category(dataset, taus, categories, ap=ref_ap):
    """G-mAP within each ground-truth-count category; empty ones omitted.

    ``categories`` is a sequence of (label, lo, hi) with hi None meaning
    unbounded.
    """
    out = {}
    for label, lo, hi in categories:
        subset = [
            pair for pair in dataset
            if lo <= len(pair[1]) and (hi is None or len(pair[1]) <= hi)
        ]
        if subset:
            out[label] = ref_g_map(subset, taus, ap)
    return out


def ref_miou_at_k(dataset, k):
    """Mean top-k max-IoU over queries with at least k moments.

    Each of the k rank slots contributes that prediction's best IoU
    against the full moment set (no one-to-one consumption); absent
    slots contribute 0. Returns None when no query is eligible.
    """
    vals = []
    for preds, gts in dataset:
        if len(gts) < k:
            continue
        order = ref_rank(preds)[:k]
        total = 0.0
        for i in order:
            span = (preds[i][0], preds[i][1])
            total += max(ref_iou(span, g) for g in gts)
        vals.append(total / k)
    if not vals:
        return None
    return sum(vals) / len(vals)


def ref_mr_at_k_by_tau(dataset, k, taus):
    """Per-threshold mean recalled-moment fraction under a top-k budget.

    For one query, a moment counts as recalled when some top-k
    prediction reaches IoU >= tau with it. Only queries with at least k
    moments participate. Returns None when no query is eligible.
    """
    out = {}
    for tau in taus:
        vals = []
        for preds, gts in dataset:
            if len(gts) < k:
                continue
            order = ref_rank(preds)[:k]
            hit = 0
            for g in gts:
                best = 0.0
                for i in order:
                    v = ref_iou((preds[i][0], preds[i][1]), g)
                    if v > best:
                        best = v
                if best >= tau:
                    hit += 1
            vals.append(hit / len(gts))
        if not vals:
            return None
        out[tau] = sum(vals) / len(vals)
    return out


def ref_mr_at_k(dataset, k, taus):
    per_tau = ref_mr_at_k_by_tau(dataset, k, taus)
    if per_tau is None:
        return None
    return sum(per_tau.values()) / len(per_tau)


def ref_max_matching(rows, tau):
    """Size of a maximum bipartite matching over edges {IoU >= tau}.

    ``rows`` is a prediction-by-moment IoU matrix as nested lists.
    Plain exhaustive recursion over moment subsets, memoized on the
    remaining-row index and the used-moment bitmask.
    """
    n = len(rows)
    g = len(rows[0]) if n else 0
    memo = {}

    def go(i, mask):
        if i == n:
            return 0
        key = (i, mask)
        if key in memo:
            return memo[key]
        best = go(i + 1, mask)
        row = rows[i]
        for j in range(g):
            if not (mask >> j) & 1 and row[j] >= tau:
                cand = 1 + go(i + 1, mask | (1 << j))
                if cand > best:
                    best = cand
        memo[key] = best
        return best

    return go(0, 0)


def ref_ap_exact_fraction(flags, num_gt):
    """ref_ap in exact rational arithmetic, for frozen-value derivation."""
    if not flags or num_gt <= 0:
        return Fraction(0)
    prec = []
    tp = 0
    for i, f in enumerate(flags):
        if f:
            tp += 1
        prec.append(Fraction(tp, i + 1))
    total = Fraction(0)
    for i, f in enumerate(flags):
        if f:
            total += max(prec[i:])
    return total / num_gt
