"""Evaluation and refinement toolkit for multi-moment video retrieval.

A query may be grounded by several disjoint moments in one video; this
package scores ranked window predictions against such annotations
(G-mAP with category breakdowns, mIoU@k, mR@k), refines raw windows
onto a clip grid, derives training targets, validates and profiles the
JSONL corpus format, and generates deterministic synthetic fixtures.
Every reported number is reproducible bit for bit: no tolerance-based
comparisons, exact summation for means, and explicit tie-breaking
wherever an order matters.
"""

__version__ = "0.1.0"

from .dataset import (
    DatasetStats,
    GroundTruthEntry,
    PredictionEntry,
    QCReport,
    SchemaError,
    compute_stats,
    ground_truth_from_records,
    load_ground_truth,
    load_predictions,
    load_raw_predictions,
    pred_entry_to_record,
    predictions_from_records,
    qc_compare,
    validate_file,
    write_ground_truth,
    write_predictions,
)
from .intervals import Interval, ScoredInterval, coalesce, iou, nms, set_iou, tiou_matrix
from .metrics import (
    DEFAULT_CATEGORIES,
    DEFAULT_IOU_THRESHOLDS,
    MatchResult,
    MetricConfig,
    MetricReport,
    ap_by_tau,
    average_precision,
    evaluate,
    g_map,
    map_by_category,
    greedy_assign,
    match_greedy,
    miou_at_k,
    mr_at_k,
    mr_at_k_by_tau,
)
from .postprocess import (
    PostProcessConfig,
    blend_scores,
    clip_index_range,
    postprocess,
    rerank_with_verification,
)
from .synth import SplitMix64, SynthConfig, generate
from .targets import SupervisionTargets, clip_agreement_matrix, max_tiou_targets, supervision_targets

__all__ = [
    "__version__",
    "Interval",
    "ScoredInterval",
    "iou",
    "tiou_matrix",
    "coalesce",
    "set_iou",
    "nms",
    "DEFAULT_IOU_THRESHOLDS",
    "DEFAULT_CATEGORIES",
    "MetricConfig",
    "MatchResult",
    "MetricReport",
    "greedy_assign",
    "match_greedy",
    "average_precision",
    "ap_by_tau",
    "g_map",
    "map_by_category",
    "miou_at_k",
    "mr_at_k",
    "mr_at_k_by_tau",
    "evaluate",
    "PostProcessConfig",
    "postprocess",
    "clip_index_range",
    "blend_scores",
    "rerank_with_verification",
    "SupervisionTargets",
    "max_tiou_targets",
    "clip_agreement_matrix",
    "supervision_targets",
    "SchemaError",
    "GroundTruthEntry",
    "PredictionEntry",
    "QCReport",
    "DatasetStats",
    "load_ground_truth",
    "load_predictions",
    "load_raw_predictions",
    "ground_truth_from_records",
    "predictions_from_records",
    "pred_entry_to_record",
    "write_ground_truth",
    "write_predictions",
    "validate_file",
    "qc_compare",
    "compute_stats",
    "SynthConfig",
    "SplitMix64",
    "generate",
]
