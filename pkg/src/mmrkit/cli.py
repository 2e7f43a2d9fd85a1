"""Command-line front end.

Subcommands: evaluate, stats, validate, qc, nms, postprocess, targets,
synth. Human-readable summaries go to standard output (headline metrics
scaled by 100 with two decimals); the full structured document, with raw
[0, 1] values and an embedded run manifest, is written to --out.

Reports are byte-identical across repeated runs on identical inputs and
flags. The one wall-clock field, the manifest timestamp, follows the
reproducible-build convention: when SOURCE_DATE_EPOCH is set it is used
verbatim, otherwise the current UTC time appears.

Exit codes: 0 success, 1 input or schema error, 2 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone

from . import __version__
from .dataset import (
    PredictionEntry,
    SchemaError,
    compute_stats,
    load_ground_truth,
    load_predictions,
    load_raw_predictions,
    pred_entry_to_record,
    qc_compare,
    validate_file,
    write_ground_truth,
    write_predictions,
)
from .intervals import nms as nms_op
from .metrics import MetricConfig, evaluate as evaluate_op
from .postprocess import PostProcessConfig, postprocess as postprocess_op
from .synth import SynthConfig, generate
from .targets import supervision_targets

__all__ = [
    "RunManifest",
    "build_manifest",
    "build_evaluate_document",
    "document_bytes",
    "file_digest",
    "records_digest",
    "main",
    "entry",
]

_TOOL = "mmrkit"


@dataclass(frozen=True)
class RunManifest:
    """Provenance block embedded in every structured report."""

    tool: str
    version: str
    command: str
    inputs: dict
    config: dict
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "inputs": self.inputs,
            "config": self.config,
            "timestamp": self.timestamp,
        }


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = int(epoch) if epoch else int(time.time())
    return datetime.fromtimestamp(moment, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def file_digest(path) -> dict:
    h = hashlib.sha256()
    size = 0
    with open(path, "rb") as fh:
        while chunk := fh.read(1 << 16):
            h.update(chunk)
            size += len(chunk)
    return {"path": str(path), "sha256": h.hexdigest(), "bytes": size}


def records_digest(records, name: str) -> dict:
    """Digest of in-memory records over their canonical serialization."""
    h = hashlib.sha256()
    size = 0
    for rec in records:
        line = (json.dumps(rec) + "\n").encode("utf-8")
        h.update(line)
        size += len(line)
    return {"path": f"<records:{name}>", "sha256": h.hexdigest(), "bytes": size}


def build_manifest(command: str, inputs: dict, config: dict) -> RunManifest:
    return RunManifest(
        tool=_TOOL,
        version=__version__,
        command=command,
        inputs=inputs,
        config=config,
        timestamp=_timestamp(),
    )


def document_bytes(document: dict) -> bytes:
    """The one serialization used for every structured report."""
    return (json.dumps(document, indent=2) + "\n").encode("utf-8")


def _emit(document: dict, out_path) -> None:
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(document_bytes(document))


def _load_gt(path):
    if not os.path.exists(path):
        raise SchemaError("cannot read ground truth: no such file", path=str(path))
    try:
        return load_ground_truth(path)
    except SchemaError:
        raise
    except OSError as exc:
        raise SchemaError(f"cannot read ground truth: {exc}", path=str(path)) from exc


def _pct(v) -> str:
    return f"{v * 100:.2f}" if v is not None else "n/a"


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def build_evaluate_document(gt_entries, pred_entries, config: MetricConfig, inputs: dict, workers: int = 1) -> dict:
    """Shared by the CLI and the in-process bindings, byte for byte.

    The manifest records only result-affecting configuration.  Worker count
    changes scheduling, never values, so it stays out of the document.
    """
    report = evaluate_op(gt_entries, pred_entries, config=config, workers=workers)
    manifest = build_manifest("evaluate", inputs, {"metrics": config.to_dict()})
    return {"manifest": manifest.to_dict(), "report": report.to_dict()}


def _print_report_table(rep: dict) -> None:
    cats = [c["label"] for c in rep["config"]["categories"]]
    ks = [str(k) for k in rep["config"]["k_values"]]
    head = ["G-mAP"] + [f"@{c}" for c in cats] + [f"mIoU@{k}" for k in ks] + [f"mR@{k}" for k in ks]
    vals = [_pct(rep["g_map"])]
    vals += [_pct(rep["map_by_category"].get(c)) for c in cats]
    vals += [_pct(rep["miou_at_k"].get(k)) for k in ks]
    vals += [_pct(rep["mr_at_k"].get(k)) for k in ks]
    widths = [max(len(h), len(v)) for h, v in zip(head, vals)]
    print("  ".join(h.rjust(w) for h, w in zip(head, widths)))
    print("  ".join(v.rjust(w) for v, w in zip(vals, widths)))
    print(f"queries: {rep['num_queries']}  predictions: {rep['num_predictions']}"
          f"  without predictions: {rep['queries_without_predictions']}")


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def cmd_evaluate(args) -> int:
    gt = _load_gt(args.gt)
    preds = load_predictions(args.pred)
    cfg_kwargs = {}
    if args.iou_thresholds:
        cfg_kwargs["iou_thresholds"] = _parse_float_list(args.iou_thresholds)
    if args.recall_thresholds:
        cfg_kwargs["recall_thresholds"] = _parse_float_list(args.recall_thresholds)
    if args.k_values:
        cfg_kwargs["k_values"] = tuple(int(v) for v in args.k_values.split(","))
    if args.ap_mode:
        cfg_kwargs["ap_mode"] = args.ap_mode
    config = MetricConfig(**cfg_kwargs)
    inputs = {"ground_truth": file_digest(args.gt), "predictions": file_digest(args.pred)}
    document = build_evaluate_document(gt, preds, config, inputs, workers=args.threads)
    _print_report_table(document["report"])
    _emit(document, args.out)
    return 0


# ---------------------------------------------------------------------------
# stats / validate / qc
# ---------------------------------------------------------------------------


def cmd_stats(args) -> int:
    entries = _load_gt(args.gt)
    stop_words = None
    if args.stop_words:
        with open(args.stop_words, "r", encoding="utf-8") as fh:
            stop_words = [w for w in fh.read().split() if w]
    stats = compute_stats(
        entries,
        bin_width=args.bin_width,
        grid_resolution=args.grid_resolution,
        stop_words=stop_words,
        top_n=args.top_n,
        long_threshold=args.long_threshold,
    )
    payload = stats.to_dict()
    print(f"queries: {stats.num_queries}  videos: {stats.num_videos}  moments: {stats.num_moments}")
    print(f"avg moments/query: {stats.avg_moments_per_query:.2f}"
          f"  avg query tokens: {stats.avg_query_len_tokens:.1f}")
    print(f"moments > {args.long_threshold:g} s: {stats.long_moments['count']}"
          f" ({stats.long_moments['share_of_moments'] * 100:.1f}% of moments)")
    print(f"moment/video time ratio: {stats.moment_video_ratio:.3f}")
    if stats.top_words:
        print("top words: " + ", ".join(f"{w} ({c})" for w, c in stats.top_words))
    manifest = build_manifest("stats", {"ground_truth": file_digest(args.gt)}, {
        "bin_width": args.bin_width,
        "grid_resolution": args.grid_resolution,
        "top_n": args.top_n,
        "long_threshold": args.long_threshold,
        "stop_words": args.stop_words or "builtin",
    })
    _emit({"manifest": manifest.to_dict(), "stats": payload}, args.out)
    return 0


def cmd_validate(args) -> int:
    if not os.path.exists(args.path):
        raise SchemaError("cannot read file: no such file", path=str(args.path))
    errors = validate_file(args.path, args.kind)
    records = [
        {"path": e.path, "line": e.line, "field": e.field, "message": str(e)}
        for e in errors
    ]
    manifest = build_manifest("validate", {"file": file_digest(args.path)}, {"kind": args.kind})
    _emit({"manifest": manifest.to_dict(), "valid": not errors, "errors": records}, args.out)
    for e in errors:
        print(str(e))
    print(f"{args.path}: {'OK' if not errors else f'{len(errors)} error(s)'}")
    return 0 if not errors else 1


def cmd_qc(args) -> int:
    a = _load_gt(args.a)
    b = _load_gt(args.b)
    report = qc_compare(a, b, threshold=args.threshold)
    payload = report.to_dict()
    rate = payload["pass_rate"]
    rate_txt = f"{_pct(rate)}%" if rate is not None else "n/a"
    print(f"compared: {payload['num_compared']}  flagged: {len(report.flagged_qids)}  pass rate: {rate_txt}")
    if report.flagged_qids:
        print("flagged qids: " + ", ".join(str(q) for q in report.flagged_qids))
    if report.only_in_a or report.only_in_b:
        print(f"only in a: {len(report.only_in_a)}  only in b: {len(report.only_in_b)}")
    manifest = build_manifest("qc", {"a": file_digest(args.a), "b": file_digest(args.b)},
                              {"threshold": args.threshold})
    _emit({"manifest": manifest.to_dict(), "qc": payload}, args.out)
    return 0


# ---------------------------------------------------------------------------
# nms / postprocess / targets / synth
# ---------------------------------------------------------------------------


def _write_pred_lines(entries, out_path) -> None:
    if out_path:
        write_predictions(entries, out_path)
    else:
        for e in entries:
            print(json.dumps(pred_entry_to_record(e)))


def cmd_nms(args) -> int:
    entries = load_predictions(args.pred)
    out = [
        PredictionEntry(qid=e.qid, windows=tuple(nms_op(e.windows, args.iou)),
                        input_order_differed=e.input_order_differed)
        for e in entries
    ]
    _write_pred_lines(out, args.out)
    kept = sum(len(e.windows) for e in out)
    total = sum(len(e.windows) for e in entries)
    print(f"kept {kept} of {total} windows at IoU {args.iou:g}", file=sys.stderr)
    return 0


def cmd_postprocess(args) -> int:
    if (args.duration is None) == (args.gt is None):
        raise ValueError("provide exactly one of --duration or --gt for clamp bounds")
    raw = load_raw_predictions(args.pred)
    durations = None
    if args.gt is not None:
        durations = {e.qid: e.duration for e in _load_gt(args.gt)}
    out_entries = []
    for qid, rows in raw:
        if durations is not None:
            if qid not in durations:
                raise SchemaError(f"qid {qid} has no ground-truth entry to take a duration from", path=str(args.pred))
            clamp_to = durations[qid]
        else:
            clamp_to = args.duration
        cfg = PostProcessConfig(
            clamp_to=clamp_to,
            clip_rate_r=args.clip_rate,
            min_len=args.min_len,
            max_len=args.max_len,
            round_granularity=args.granularity,
        )
        refined = postprocess_op(rows, cfg)
        out_entries.append(PredictionEntry(qid=qid, windows=tuple(refined), input_order_differed=False))
    _write_pred_lines(out_entries, args.out)
    print(f"refined {sum(len(e.windows) for e in out_entries)} windows in {len(out_entries)} queries", file=sys.stderr)
    return 0


def cmd_targets(args) -> int:
    gt = _load_gt(args.gt)
    preds = {e.qid: e for e in load_predictions(args.pred)}
    unknown = sorted(set(preds) - {e.qid for e in gt})
    if unknown:
        raise SchemaError(f"unknown qid in predictions: {unknown[0]}", path=str(args.pred))
    per_query = []
    for entry in gt:
        num_clips = max(1, math.ceil(entry.duration * args.clip_rate))
        pred_entry = preds.get(entry.qid)
        windows = pred_entry.windows if pred_entry is not None else ()
        t = supervision_targets(windows, entry.moments, num_clips, args.clip_rate)
        per_query.append({
            "qid": entry.qid,
            "num_clips": num_clips,
            "max_tiou": [float(v) for v in t.max_tiou],
            "agreement": [[int(v) for v in row] for row in t.agreement],
        })
    manifest = build_manifest("targets", {
        "ground_truth": file_digest(args.gt),
        "predictions": file_digest(args.pred),
    }, {"clip_rate": args.clip_rate})
    _emit({"manifest": manifest.to_dict(), "targets": per_query}, args.out)
    print(f"built targets for {len(per_query)} queries", file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    config = SynthConfig(
        seed=args.seed,
        num_queries=args.num_queries,
        duration_range=(args.duration_min, args.duration_max),
        moment_len_range=(args.moment_len_min, args.moment_len_max),
        jitter=args.jitter,
        drop_prob=args.drop_prob,
        spurious_prob=args.spurious_prob,
    )
    gt, preds = generate(config)
    write_ground_truth(gt, args.gt_out)
    write_predictions(preds, args.pred_out)
    print(f"wrote {len(gt)} queries to {args.gt_out} and predictions to {args.pred_out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=_TOOL, description="multi-moment retrieval evaluation toolkit")
    parser.add_argument("--version", action="version", version=f"{_TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score predictions against annotations")
    p.add_argument("--gt", required=True, help="ground-truth JSONL")
    p.add_argument("--pred", required=True, help="prediction JSONL")
    p.add_argument("--iou-thresholds", help="comma list, default 0.5..0.95 step 0.05")
    p.add_argument("--recall-thresholds", help="comma list, default 0.5..0.95 step 0.05")
    p.add_argument("--k-values", help="comma list, default 1,2,3")
    p.add_argument("--ap-mode", choices=["exact-envelope", "eleven-point"])
    p.add_argument("--threads", type=int, default=1, help="worker threads; output is identical for any value")
    p.add_argument("--out", help="write the structured report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="corpus statistics for an annotation file")
    p.add_argument("--gt", required=True)
    p.add_argument("--bin-width", type=float, default=2.0)
    p.add_argument("--grid-resolution", type=int, default=25)
    p.add_argument("--stop-words", help="file of whitespace-separated words to ignore")
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--long-threshold", type=float, default=20.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="schema-check a JSONL file, reporting every error")
    p.add_argument("path")
    p.add_argument("--kind", choices=["gt", "pred"], required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("qc", help="compare two annotation passes of the same queries")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_qc)

    p = sub.add_parser("nms", help="suppress overlapping windows per query")
    p.add_argument("--pred", required=True)
    p.add_argument("--iou", type=float, default=0.7)
    p.add_argument("--out", help="filtered prediction JSONL (default: stdout)")
    p.set_defaults(func=cmd_nms)

    p = sub.add_parser("postprocess", help="snap raw windows onto the clip grid")
    p.add_argument("--pred", required=True)
    p.add_argument("--duration", type=float, help="one clamp duration for every query")
    p.add_argument("--gt", help="take per-query durations from this annotation file")
    p.add_argument("--clip-rate", type=float, default=0.5)
    p.add_argument("--min-len", type=float)
    p.add_argument("--max-len", type=float)
    p.add_argument("--granularity", type=float)
    p.add_argument("--out", help="refined prediction JSONL (default: stdout)")
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("targets", help="emit per-query training targets")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--clip-rate", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_targets)

    p = sub.add_parser("synth", help="generate a deterministic synthetic corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--num-queries", type=int, default=100)
    p.add_argument("--duration-min", type=float, default=120.0)
    p.add_argument("--duration-max", type=float, default=240.0)
    p.add_argument("--moment-len-min", type=float, default=2.0)
    p.add_argument("--moment-len-max", type=float, default=20.0)
    p.add_argument("--jitter", type=float, default=1.0)
    p.add_argument("--drop-prob", type=float, default=0.1)
    p.add_argument("--spurious-prob", type=float, default=0.3)
    p.add_argument("--gt-out", required=True)
    p.add_argument("--pred-out", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - an invariant broke somewhere inside
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
