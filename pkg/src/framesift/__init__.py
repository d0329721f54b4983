"""framesift: budget-constrained frame curation and detection evaluation.

Select video frames for labeling (uniform / frame-difference / random),
score detector output (IoU curves, precision/recall, mAP@0.5), quantify
temporal prediction stability via empirical Lipschitz-constant percentiles,
and run a human-in-the-loop box-correction service whose exports feed the
next fine-tuning round.
"""

from .errors import (
    DecodeError,
    DimensionMismatch,
    EmptyBudget,
    EmptySequence,
    FramesiftError,
    InvalidFraction,
    InvalidThreshold,
    MissingPredictions,
    NoGroundTruth,
    NoSamples,
    NothingToExport,
    ParseError,
    RangeError,
    SequenceTooShort,
)
from .ingest import (
    Annotation,
    AnnotationSet,
    BoundingBox,
    Frame,
    FrameSequence,
    GrayFrame,
    Prediction,
    PredictionSet,
    box_to_normalized,
    grayscale_sequence,
    load_annotations,
    load_predictions,
    load_sequence,
    normalized_to_box,
    to_grayscale,
)
from .metrics import (
    EvalReport,
    IoUCurve,
    MatchResult,
    average_precision,
    evaluate,
    iou,
    map50,
    match_detections,
    per_frame_iou_curve,
    precision_recall,
)
from .sampling import (
    DiffSeries,
    SamplingPlan,
    diff_sample,
    export_plan,
    frame_diff_series,
    import_plan,
    random_sample,
    uniform_sample,
)
from .stability import (
    LipschitzReport,
    QuotientSample,
    QuotientSet,
    frame_distance,
    grayscale_map,
    lipschitz_quotients,
    quantile,
    quantiles,
)

__version__ = "0.1.0"
