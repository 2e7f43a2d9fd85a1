"""Line-delimited annotation and prediction files, plus corpus tooling.

One JSON object per line. Ground truth:

    {"qid": 17, "query": "...", "vid": "...", "duration": 150.0,
     "relevant_windows": [[0.0, 10.0], [24.0, 38.0]]}

Predictions:

    {"qid": 17, "pred_relevant_windows": [[0.0, 12.0, 0.95], ...]}

Unknown fields are ignored so files from other tooling load as-is.
Every loader error is a SchemaError carrying the file path, the
1-based line number, and the offending field.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .intervals import Interval, ScoredInterval, coalesce, set_iou

__all__ = [
    "SchemaError",
    "GroundTruthEntry",
    "PredictionEntry",
    "load_ground_truth",
    "load_predictions",
    "load_raw_predictions",
    "ground_truth_from_records",
    "predictions_from_records",
    "write_ground_truth",
    "write_predictions",
    "gt_entry_to_record",
    "pred_entry_to_record",
    "validate_file",
    "qc_compare",
    "QCReport",
    "compute_stats",
    "DatasetStats",
    "DEFAULT_STOP_WORDS",
]


class SchemaError(ValueError):
    """A structurally invalid record, located by file, line, and field."""

    def __init__(self, message: str, *, path: Optional[str] = None, line: Optional[int] = None, field: Optional[str] = None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ": ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class GroundTruthEntry:
    qid: int
    query: str
    vid: str
    duration: float
    moments: tuple[Interval, ...]


@dataclass(frozen=True)
class PredictionEntry:
    """A ranked window list for one query.

    ``windows`` is always sorted by descending score (ties to the
    earlier start, then file order); ``input_order_differed`` records
    whether the file actually arrived in a different order.
    """

    qid: int
    windows: tuple[ScoredInterval, ...]
    input_order_differed: bool = False


def _fail(msg, path, line, field=None):
    raise SchemaError(msg, path=path, line=line, field=field)


def _as_int(obj, key, path, line):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"expected an integer, got {v!r}", path, line, key)
    return v


def _as_str(obj, key, path, line):
    v = obj.get(key)
    if not isinstance(v, str):
        _fail(f"expected a string, got {v!r}", path, line, key)
    return v


def _as_number(v, key, path, line):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"expected a number, got {v!r}", path, line, key)
    v = float(v)
    if not math.isfinite(v):
        _fail(f"expected a finite number, got {v!r}", path, line, key)
    return v


def _require(obj, key, path, line):
    if not isinstance(obj, dict):
        _fail(f"expected a JSON object, got {type(obj).__name__}", path, line)
    if key not in obj:
        _fail("missing required field", path, line, key)


def parse_gt_record(obj, path: Optional[str] = None, line: Optional[int] = None) -> GroundTruthEntry:
    for key in ("qid", "query", "vid", "duration", "relevant_windows"):
        _require(obj, key, path, line)
    qid = _as_int(obj, "qid", path, line)
    query = _as_str(obj, "query", path, line)
    vid = _as_str(obj, "vid", path, line)
    duration = _as_number(obj.get("duration"), "duration", path, line)
    if duration <= 0.0:
        _fail(f"duration must be positive, got {duration}", path, line, "duration")
    windows = obj.get("relevant_windows")
    if not isinstance(windows, list):
        _fail(f"expected a list of [start, end] pairs, got {windows!r}", path, line, "relevant_windows")
    if not windows:
        _fail("query has no moments", path, line, "relevant_windows")
    moments = []
    for i, w in enumerate(windows):
        key = f"relevant_windows[{i}]"
        if not isinstance(w, list) or len(w) != 2:
            _fail(f"expected [start, end], got {w!r}", path, line, key)
        s = _as_number(w[0], key, path, line)
        e = _as_number(w[1], key, path, line)
        if s < 0.0 or s > e:
            _fail(f"moment must satisfy 0 <= start <= end, got [{s}, {e}]", path, line, key)
        if e > duration:
            _fail(f"moment exceeds duration ({e} > {duration})", path, line, key)
        moments.append(Interval(s, e))
    return GroundTruthEntry(qid=qid, query=query, vid=vid, duration=duration, moments=tuple(moments))


def _rank_windows(rows: list[tuple[float, float, float]]) -> tuple[list[int], bool]:
    order = sorted(range(len(rows)), key=lambda i: (-rows[i][2], rows[i][0], i))
    return order, order != list(range(len(rows)))


def parse_pred_record(obj, path: Optional[str] = None, line: Optional[int] = None) -> PredictionEntry:
    for key in ("qid", "pred_relevant_windows"):
        _require(obj, key, path, line)
    qid = _as_int(obj, "qid", path, line)
    rows = _parse_pred_windows(obj, path, line, validate_span=True)
    order, differed = _rank_windows(rows)
    windows = tuple(ScoredInterval(Interval(rows[i][0], rows[i][1]), rows[i][2]) for i in order)
    return PredictionEntry(qid=qid, windows=windows, input_order_differed=differed)


def _parse_pred_windows(obj, path, line, validate_span: bool) -> list[tuple[float, float, float]]:
    windows = obj.get("pred_relevant_windows")
    if not isinstance(windows, list):
        _fail(f"expected a list of [start, end, score] triples, got {windows!r}", path, line, "pred_relevant_windows")
    rows = []
    for i, w in enumerate(windows):
        key = f"pred_relevant_windows[{i}]"
        if not isinstance(w, list) or len(w) != 3:
            _fail(f"expected [start, end, score], got {w!r}", path, line, key)
        s = _as_number(w[0], key, path, line)
        e = _as_number(w[1], key, path, line)
        score = _as_number(w[2], key, path, line)
        if validate_span and (s < 0.0 or s > e):
            _fail(f"window must satisfy 0 <= start <= end, got [{s}, {e}] (run postprocess on raw output first)", path, line, key)
        rows.append((s, e, score))
    return rows


def _iter_jsonl(path):
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc}", path=str(path)) from exc
    with fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", path=str(path), line=line_no) from exc
            yield line_no, obj


def load_ground_truth(path) -> list[GroundTruthEntry]:
    """Load and validate an annotation file; duplicate qids are rejected."""
    entries = []
    seen = set()
    for line_no, obj in _iter_jsonl(path):
        entry = parse_gt_record(obj, path=str(path), line=line_no)
        if entry.qid in seen:
            _fail(f"duplicate qid {entry.qid}", str(path), line_no, "qid")
        seen.add(entry.qid)
        entries.append(entry)
    return entries


def load_predictions(path) -> list[PredictionEntry]:
    """Load a prediction file, re-sorting each window list by score."""
    entries = []
    seen = set()
    for line_no, obj in _iter_jsonl(path):
        entry = parse_pred_record(obj, path=str(path), line=line_no)
        if entry.qid in seen:
            _fail(f"duplicate qid {entry.qid}", str(path), line_no, "qid")
        seen.add(entry.qid)
        entries.append(entry)
    return entries


def load_raw_predictions(path) -> list[tuple[int, list[tuple[float, float, float]]]]:
    """Load predictions without span validation, for the refinement path.

    Raw model output may carry reversed or out-of-range endpoints; only
    finiteness is enforced here. Returns (qid, [(start, end, score)])
    pairs in file order, window order preserved.
    """
    out = []
    seen = set()
    for line_no, obj in _iter_jsonl(path):
        for key in ("qid", "pred_relevant_windows"):
            _require(obj, key, str(path), line_no)
        qid = _as_int(obj, "qid", str(path), line_no)
        if qid in seen:
            _fail(f"duplicate qid {qid}", str(path), line_no, "qid")
        seen.add(qid)
        rows = _parse_pred_windows(obj, str(path), line_no, validate_span=False)
        out.append((qid, rows))
    return out


def ground_truth_from_records(records: Iterable[Mapping]) -> list[GroundTruthEntry]:
    """Validate in-memory record mappings; line numbers count from 1."""
    entries = []
    seen = set()
    for i, obj in enumerate(records, start=1):
        entry = parse_gt_record(obj, line=i)
        if entry.qid in seen:
            _fail(f"duplicate qid {entry.qid}", None, i, "qid")
        seen.add(entry.qid)
        entries.append(entry)
    return entries


def predictions_from_records(records: Iterable[Mapping]) -> list[PredictionEntry]:
    entries = []
    seen = set()
    for i, obj in enumerate(records, start=1):
        entry = parse_pred_record(obj, line=i)
        if entry.qid in seen:
            _fail(f"duplicate qid {entry.qid}", None, i, "qid")
        seen.add(entry.qid)
        entries.append(entry)
    return entries


def gt_entry_to_record(entry: GroundTruthEntry) -> dict:
    return {
        "qid": entry.qid,
        "query": entry.query,
        "vid": entry.vid,
        "duration": entry.duration,
        "relevant_windows": [[m.start, m.end] for m in entry.moments],
    }


def pred_entry_to_record(entry: PredictionEntry) -> dict:
    return {
        "qid": entry.qid,
        "pred_relevant_windows": [[w.start, w.end, w.score] for w in entry.windows],
    }


def _write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def write_ground_truth(entries: Sequence[GroundTruthEntry], path) -> None:
    _write_jsonl((gt_entry_to_record(e) for e in entries), path)


def write_predictions(entries: Sequence[PredictionEntry], path) -> None:
    _write_jsonl((pred_entry_to_record(e) for e in entries), path)


def validate_file(path, kind: str) -> list[SchemaError]:
    """Collect every schema error in a file instead of stopping at the first.

    Args:
        path: JSONL file to check.
        kind: "gt" or "pred".

    Returns:
        All errors found, in line order (empty when the file is clean).
    """
    if kind not in ("gt", "pred"):
        raise ValueError(f"kind must be 'gt' or 'pred', got {kind!r}")
    parse = parse_gt_record if kind == "gt" else parse_pred_record
    errors: list[SchemaError] = []
    seen = set()
    try:
        for line_no, obj in _iter_jsonl(path):
            try:
                entry = parse(obj, path=str(path), line=line_no)
                if entry.qid in seen:
                    _fail(f"duplicate qid {entry.qid}", str(path), line_no, "qid")
                seen.add(entry.qid)
            except SchemaError as exc:
                errors.append(exc)
    except SchemaError as exc:  # unreadable file or invalid JSON: cannot continue
        errors.append(exc)
    return errors


# ---------------------------------------------------------------------------
# annotation consistency
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QCReport:
    """Agreement between two annotation passes over shared qids.

    ``overlap`` per qid is the IoU of the two coalesced moment unions;
    a qid is flagged when it falls strictly below the threshold.
    Qids present on only one side are listed, not treated as errors.
    """

    threshold: float
    per_qid: tuple[tuple[int, float, bool], ...]  # (qid, overlap, flagged), sorted by qid
    flagged_qids: tuple[int, ...]
    pass_rate: Optional[float]
    only_in_a: tuple[int, ...]
    only_in_b: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "num_compared": len(self.per_qid),
            "pass_rate": self.pass_rate,
            "flagged_qids": list(self.flagged_qids),
            "only_in_a": list(self.only_in_a),
            "only_in_b": list(self.only_in_b),
            "per_qid": [
                {"qid": qid, "overlap": overlap, "flagged": flagged}
                for qid, overlap, flagged in self.per_qid
            ],
        }


def qc_compare(a: Sequence[GroundTruthEntry], b: Sequence[GroundTruthEntry], threshold: float = 0.9) -> QCReport:
    """Compare two annotation sets of the same queries.

    Args:
        a: one annotation pass.
        b: an independent pass over (some of) the same qids.
        threshold: flag overlap strictly below this value.
    """
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    by_a = {e.qid: e for e in a}
    by_b = {e.qid: e for e in b}
    shared = sorted(by_a.keys() & by_b.keys())
    per_qid = []
    flagged = []
    for qid in shared:
        overlap = set_iou(by_a[qid].moments, by_b[qid].moments)
        is_flagged = overlap < threshold
        per_qid.append((qid, overlap, is_flagged))
        if is_flagged:
            flagged.append(qid)
    pass_rate = (len(shared) - len(flagged)) / len(shared) if shared else None
    return QCReport(
        threshold=threshold,
        per_qid=tuple(per_qid),
        flagged_qids=tuple(flagged),
        pass_rate=pass_rate,
        only_in_a=tuple(sorted(by_a.keys() - by_b.keys())),
        only_in_b=tuple(sorted(by_b.keys() - by_a.keys())),
    )


# ---------------------------------------------------------------------------
# corpus statistics
# ---------------------------------------------------------------------------

DEFAULT_STOP_WORDS = frozenset("""
a about above after again all also am an and any are as at be because been
before being below between both but by can could did do does doing down
during each few for from further had has have having he her here hers him
his how i if in into is it its itself just me more most my no nor not now
of off on once only or other our ours out over own s same she should so
some such t than that the their theirs them then there these they this
those through to too under until up very was we were what when where which
while who whom why will with you your yours
""".split())

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class DatasetStats:
    """Corpus-level descriptive statistics for an annotation set."""

    num_queries: int
    num_videos: int
    num_moments: int
    avg_moments_per_query: float
    avg_query_len_tokens: float
    total_moment_seconds: float
    total_video_seconds: float
    moment_video_ratio: float
    length_histogram: dict
    long_moments: dict
    location_grid: dict
    top_words: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "num_queries": self.num_queries,
            "num_videos": self.num_videos,
            "num_moments": self.num_moments,
            "avg_moments_per_query": self.avg_moments_per_query,
            "avg_query_len_tokens": self.avg_query_len_tokens,
            "total_moment_seconds": self.total_moment_seconds,
            "total_video_seconds": self.total_video_seconds,
            "moment_video_ratio": self.moment_video_ratio,
            "length_histogram": self.length_histogram,
            "long_moments": self.long_moments,
            "location_grid": self.location_grid,
            "top_words": [[w, c] for w, c in self.top_words],
        }


def compute_stats(
    entries: Sequence[GroundTruthEntry],
    bin_width: float = 2.0,
    grid_resolution: int = 25,
    stop_words: Optional[Iterable[str]] = None,
    top_n: int = 10,
    long_threshold: float = 20.0,
    lemma_table: Optional[Mapping[str, str]] = None,
) -> DatasetStats:
    """Descriptive statistics over an annotation set.

    Args:
        entries: loaded annotations.
        bin_width: moment-length histogram bin width in seconds.
        grid_resolution: cells per axis of the normalized
            (start / duration, end / duration) location grid.
        stop_words: words excluded from the frequency ranking; defaults
            to a small builtin English list.
        top_n: how many words to rank.
        long_threshold: report how many moments run strictly longer
            than this many seconds, with both natural denominators
            (all moments, all queries).
        lemma_table: optional token -> lemma mapping applied before
            counting; tokens are lowercased and split on punctuation.

    Notes:
        ``moment_video_ratio`` counts each video's duration once and
        coalesces its moments across every query on that video, so the
        value is the fraction of corpus video time covered by at least
        one moment and always lies in (0, 1] for in-range annotations.
        The plain sum of moment lengths is still reported as
        ``total_moment_seconds``.
    """
    if not entries:
        raise ValueError("compute_stats requires at least one entry")
    if bin_width <= 0.0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    if grid_resolution < 1:
        raise ValueError(f"grid_resolution must be >= 1, got {grid_resolution}")
    if top_n < 0:
        raise ValueError(f"top_n must be >= 0, got {top_n}")
    stop = frozenset(stop_words) if stop_words is not None else DEFAULT_STOP_WORDS

    num_queries = len(entries)
    num_moments = sum(len(e.moments) for e in entries)
    total_moment_seconds = math.fsum(m.length for e in entries for m in e.moments)

    durations_by_vid: dict[str, float] = {}
    moments_by_vid: dict[str, list[Interval]] = {}
    for e in entries:
        durations_by_vid.setdefault(e.vid, e.duration)
        moments_by_vid.setdefault(e.vid, []).extend(e.moments)
    total_video_seconds = math.fsum(durations_by_vid.values())
    covered = math.fsum(
        span.length for vid in durations_by_vid for span in coalesce(moments_by_vid[vid])
    )
    moment_video_ratio = covered / total_video_seconds if total_video_seconds > 0 else 0.0

    avg_query_len = math.fsum(len(e.query.split()) for e in entries) / num_queries

    lengths = [m.length for e in entries for m in e.moments]
    n_bins = max(1, math.floor(max(lengths) / bin_width) + 1)
    counts = [0] * n_bins
    for ln in lengths:
        counts[min(math.floor(ln / bin_width), n_bins - 1)] += 1
    long_count = sum(1 for ln in lengths if ln > long_threshold)

    g = grid_resolution
    grid = [[0] * g for _ in range(g)]
    for e in entries:
        for m in e.moments:
            u = min(int((m.start / e.duration) * g), g - 1)
            v = min(int((m.end / e.duration) * g), g - 1)
            grid[u][v] += 1

    words: Counter = Counter()
    for e in entries:
        for tok in _TOKEN_RE.findall(e.query.lower()):
            if lemma_table is not None:
                tok = lemma_table.get(tok, tok)
            if tok not in stop:
                words[tok] += 1
    top_words = tuple(sorted(words.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n])

    return DatasetStats(
        num_queries=num_queries,
        num_videos=len(durations_by_vid),
        num_moments=num_moments,
        avg_moments_per_query=num_moments / num_queries,
        avg_query_len_tokens=avg_query_len,
        total_moment_seconds=total_moment_seconds,
        total_video_seconds=total_video_seconds,
        moment_video_ratio=moment_video_ratio,
        length_histogram={"bin_width": bin_width, "counts": counts},
        long_moments={
            "threshold_seconds": long_threshold,
            "count": long_count,
            "share_of_moments": long_count / num_moments,
            "share_of_queries": long_count / num_queries,
        },
        location_grid={"resolution": g, "counts": grid},
        top_words=top_words,
    )
