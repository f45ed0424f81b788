"""Multilevel gray-image thresholding by agglomerative merging of histogram classes."""

__version__ = "0.1.0"

from .engine import (
    ClassArray,
    ClassRecord,
    EmptyHistogram,
    Histogram,
    InvalidLevel,
    InvalidStop,
    MergeRecord,
    MergeTrace,
    SingleClass,
    ThresholdSet,
    between_class_variance,
    build_initial,
    find_min_pair,
    histogram_from_csv,
    histogram_from_json,
    merge_step,
    pair_distance,
    run_dendrogram,
    thresholds_at,
)
from .metrics import (
    BinaryMask,
    DimensionMismatch,
    GrayImage,
    MetricsReport,
    RangeMismatch,
    foreground_of,
    map_to_class_means,
    misclassification_error,
    psnr,
    quantize,
    relative_area_error,
)
from .oracle import Infeasible, TooLarge, exhaustive_otsu, naive_variances, within_class_scatter
from .pgm import (
    MalformedHeader,
    MalformedPayload,
    PgmError,
    TruncatedPayload,
    UnsupportedMaxval,
    histogram_of,
    read_pgm,
    write_pgm,
)
from .bench import run_benchmark, synthetic_histogram

__all__ = [
    "__version__",
    "BinaryMask",
    "ClassArray",
    "ClassRecord",
    "DimensionMismatch",
    "EmptyHistogram",
    "GrayImage",
    "Histogram",
    "Infeasible",
    "InvalidLevel",
    "InvalidStop",
    "MalformedHeader",
    "MalformedPayload",
    "MergeRecord",
    "MergeTrace",
    "MetricsReport",
    "PgmError",
    "RangeMismatch",
    "SingleClass",
    "ThresholdSet",
    "TooLarge",
    "TruncatedPayload",
    "UnsupportedMaxval",
    "between_class_variance",
    "build_initial",
    "exhaustive_otsu",
    "find_min_pair",
    "foreground_of",
    "histogram_from_csv",
    "histogram_from_json",
    "histogram_of",
    "map_to_class_means",
    "merge_step",
    "misclassification_error",
    "naive_variances",
    "pair_distance",
    "psnr",
    "quantize",
    "read_pgm",
    "relative_area_error",
    "run_benchmark",
    "run_dendrogram",
    "synthetic_histogram",
    "thresholds_at",
    "within_class_scatter",
    "write_pgm",
]
