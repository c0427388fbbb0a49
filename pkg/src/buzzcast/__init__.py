"""Predict televised-sports viewership from pre-event Reddit engagement."""

from .boosting import (
    CvResult,
    GbmEnsemble,
    HyperParams,
    default_grid,
    fit_gbm,
    grid_search_cv,
    load_model,
    save_model,
)
from .config import BuzzcastConfig, IngestConfig, PreprocessConfig, RuleConfig, load_config
from .errors import (
    BuzzcastError,
    FeasibilityError,
    FetchError,
    InsufficientDataError,
    R2UndefinedError,
    SchemaError,
    ShapeError,
    StateError,
    ValidationError,
)
from .events import EventSpec, FetchWindow, LabeledEvent, RawPost, Sport, load_viewership_csv
from .features import (
    Dataset,
    EventEngagement,
    aggregate_event,
    load_engagement_csv,
    pearson_matrix,
    write_engagement_csv,
)
from .preprocess import (
    MinMaxScaler,
    OneHotSportEncoder,
    PreparedRun,
    prepare_run,
    split_dataset,
)
from .report import Metrics, compute_metrics
from .sentiment import (
    SentimentAnalyzers,
    SentimentScore,
    polarity_score,
    rule_based_score,
    score_posts,
)
from .shapley import Attribution, GlobalImportance, global_importance, shapley_values

__version__ = "0.1.0"

__all__ = [
    "Attribution",
    "BuzzcastConfig",
    "BuzzcastError",
    "CvResult",
    "Dataset",
    "EventEngagement",
    "EventSpec",
    "FeasibilityError",
    "FetchError",
    "FetchWindow",
    "GbmEnsemble",
    "GlobalImportance",
    "HyperParams",
    "IngestConfig",
    "InsufficientDataError",
    "LabeledEvent",
    "Metrics",
    "MinMaxScaler",
    "OneHotSportEncoder",
    "PreparedRun",
    "PreprocessConfig",
    "R2UndefinedError",
    "RawPost",
    "RuleConfig",
    "SchemaError",
    "SentimentAnalyzers",
    "SentimentScore",
    "ShapeError",
    "Sport",
    "StateError",
    "ValidationError",
    "aggregate_event",
    "compute_metrics",
    "default_grid",
    "fit_gbm",
    "global_importance",
    "grid_search_cv",
    "load_config",
    "load_engagement_csv",
    "load_model",
    "load_viewership_csv",
    "pearson_matrix",
    "polarity_score",
    "prepare_run",
    "rule_based_score",
    "save_model",
    "score_posts",
    "shapley_values",
    "split_dataset",
    "write_engagement_csv",
]
