"""In-process access to the mmrkit commands, one function per command.

Each function accepts annotation and prediction inputs either as a path
to a JSON Lines file or as the records themselves (any iterable of
mappings), and returns the dictionary the command line would have
written to --out. `to_json_bytes` applies the exact serialization the
CLI uses, so a document built here from the same files is byte-identical
to the CLI's output file.

The module holds no state. Configuration travels with each call and the
underlying evaluation fans out over worker threads only when asked, so
calls are reentrant and safe to issue concurrently.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Mapping, Optional, Sequence, Union

from mmrkit import (
    MetricConfig,
    PostProcessConfig,
    PredictionEntry,
    SchemaError,
    compute_stats,
    ground_truth_from_records,
    load_ground_truth,
    load_predictions,
    load_raw_predictions,
    nms as nms_op,
    postprocess as postprocess_op,
    pred_entry_to_record,
    predictions_from_records,
    supervision_targets,
)
from mmrkit.cli import (
    build_evaluate_document,
    build_manifest,
    document_bytes,
    file_digest,
    records_digest,
)

__all__ = ["evaluate", "stats", "nms", "postprocess", "targets", "to_json_bytes"]

Source = Union[str, os.PathLike, Iterable[Mapping]]


def to_json_bytes(document: dict) -> bytes:
    """Serialize a report document exactly as the CLI writes it."""
    return document_bytes(document)


def _is_path(source: Source) -> bool:
    return isinstance(source, (str, os.PathLike))


def _gt_input(source: Source, name: str):
    if _is_path(source):
        return load_ground_truth(source), file_digest(source)
    records = list(source)
    return ground_truth_from_records(records), records_digest(records, name)


def _pred_input(source: Source, name: str):
    if _is_path(source):
        return load_predictions(source), file_digest(source)
    records = list(source)
    return predictions_from_records(records), records_digest(records, name)


def _metric_config(config: Optional[Mapping]) -> MetricConfig:
    if config is None:
        return MetricConfig()
    if isinstance(config, MetricConfig):
        return config
    kwargs = {}
    for key, value in config.items():
        if key == "categories":
            value = tuple(tuple(c) for c in value)
        elif isinstance(value, Sequence) and not isinstance(value, str):
            value = tuple(value)
        kwargs[key] = value
    return MetricConfig(**kwargs)


def evaluate(gt: Source, pred: Source, config: Optional[Mapping] = None, workers: int = 1) -> dict:
    """Score predictions against annotations; returns the CLI's document.

    ``config`` mirrors the CLI flags as a mapping: iou_thresholds,
    recall_thresholds, k_values, ap_mode, categories. Called with file
    paths, the returned document serializes byte-for-byte to what
    ``mmrkit evaluate --out`` writes for those files.
    """
    gt_entries, gt_digest = _gt_input(gt, "ground_truth")
    pred_entries, pred_digest = _pred_input(pred, "predictions")
    inputs = {"ground_truth": gt_digest, "predictions": pred_digest}
    return build_evaluate_document(gt_entries, pred_entries, _metric_config(config),
                                   inputs, workers=workers)


def stats(
    gt: Source,
    bin_width: float = 2.0,
    grid_resolution: int = 25,
    stop_words: Optional[Iterable[str]] = None,
    top_n: int = 10,
    long_threshold: float = 20.0,
) -> dict:
    """Corpus profile of an annotation set, as a manifest-carrying document."""
    entries, digest = _gt_input(gt, "ground_truth")
    stop = list(stop_words) if stop_words is not None else None
    result = compute_stats(
        entries,
        bin_width=bin_width,
        grid_resolution=grid_resolution,
        stop_words=stop,
        top_n=top_n,
        long_threshold=long_threshold,
    )
    manifest = build_manifest("stats", {"ground_truth": digest}, {
        "bin_width": bin_width,
        "grid_resolution": grid_resolution,
        "top_n": top_n,
        "long_threshold": long_threshold,
        "stop_words": "builtin" if stop is None else "custom",
    })
    return {"manifest": manifest.to_dict(), "stats": result.to_dict()}


def nms(pred: Source, iou: float = 0.7) -> list[dict]:
    """Suppress overlapping windows per query; returns prediction records."""
    entries, _ = _pred_input(pred, "predictions")
    return [
        pred_entry_to_record(
            PredictionEntry(qid=e.qid, windows=tuple(nms_op(e.windows, iou)),
                            input_order_differed=e.input_order_differed)
        )
        for e in entries
    ]


def _raw_rows(pred: Source):
    if _is_path(pred):
        return load_raw_predictions(pred)
    out = []
    for i, rec in enumerate(pred):
        where = f"<records> record {i}"
        qid = rec.get("qid")
        if not isinstance(qid, int) or isinstance(qid, bool):
            raise SchemaError(f"{where}: field 'qid': must be an integer")
        rows = rec.get("pred_relevant_windows")
        if rows is None:
            raise SchemaError(f"{where}: field 'pred_relevant_windows': missing")
        parsed = []
        for j, row in enumerate(rows):
            vals = tuple(row)
            if len(vals) != 3 or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                for v in vals
            ):
                raise SchemaError(
                    f"{where}: field 'pred_relevant_windows[{j}]': "
                    "expected [start, end, score] with finite numbers"
                )
            parsed.append((float(vals[0]), float(vals[1]), float(vals[2])))
        out.append((qid, parsed))
    return out


def postprocess(
    pred: Source,
    duration: Optional[float] = None,
    gt: Optional[Source] = None,
    clip_rate: float = 0.5,
    min_len: Optional[float] = None,
    max_len: Optional[float] = None,
    granularity: Optional[float] = None,
) -> list[dict]:
    """Snap raw windows to the clip grid and repair bounds and lengths.

    Clamp bounds come from exactly one place: a flat ``duration`` for
    every query, or per-query durations looked up in ``gt``.
    """
    if (duration is None) == (gt is None):
        raise ValueError("provide exactly one of duration or gt for clamp bounds")
    durations = None
    if gt is not None:
        entries, _ = _gt_input(gt, "ground_truth")
        durations = {e.qid: e.duration for e in entries}
    out = []
    for qid, rows in _raw_rows(pred):
        if durations is not None:
            if qid not in durations:
                raise SchemaError(f"qid {qid} has no ground-truth entry to take a duration from")
            clamp_to = durations[qid]
        else:
            clamp_to = duration
        cfg = PostProcessConfig(
            clamp_to=clamp_to,
            clip_rate_r=clip_rate,
            min_len=min_len,
            max_len=max_len,
            round_granularity=granularity,
        )
        refined = postprocess_op(rows, cfg)
        out.append(pred_entry_to_record(
            PredictionEntry(qid=qid, windows=tuple(refined), input_order_differed=False)
        ))
    return out


def targets(pred: Source, gt: Source, clip_rate: float = 0.5) -> dict:
    """Clip-level supervision targets per query, as the CLI document."""
    gt_entries, gt_digest = _gt_input(gt, "ground_truth")
    pred_entries, pred_digest = _pred_input(pred, "predictions")
    by_qid = {e.qid: e for e in pred_entries}
    unknown = sorted(set(by_qid) - {e.qid for e in gt_entries})
    if unknown:
        raise SchemaError(f"unknown qid in predictions: {unknown[0]}")
    per_query = []
    for entry in gt_entries:
        num_clips = max(1, math.ceil(entry.duration * clip_rate))
        pred_entry = by_qid.get(entry.qid)
        windows = pred_entry.windows if pred_entry is not None else ()
        t = supervision_targets(windows, entry.moments, num_clips, clip_rate)
        per_query.append({
            "qid": entry.qid,
            "num_clips": num_clips,
            "max_tiou": [float(v) for v in t.max_tiou],
            "agreement": [[int(v) for v in row] for row in t.agreement],
        })
    manifest = build_manifest("targets", {
        "ground_truth": gt_digest,
        "predictions": pred_digest,
    }, {"clip_rate": clip_rate})
    return {"manifest": manifest.to_dict(), "targets": per_query}
