"""Run configuration: dataclass defaults overridable from a TOML file.

Sections mirror the pipeline stages: [ingest], [sentiment], [preprocess],
[explain]. Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .errors import ValidationError

DEFAULT_API_BASE = "https://api.pullpush.io"
API_BASE_ENV_VAR = "BUZZCAST_API_BASE"


@dataclass(frozen=True)
class RuleConfig:
    """Constants for the rule-based compound scorer.

    Defaults follow the published rule-based-sentiment reference constants;
    all are overridable via the [sentiment] config section.
    """

    booster_increment: float = 0.293
    caps_boost: float = 0.733
    negation_window: int = 3
    negation_factor: float = -0.74
    exclamation_increment: float = 0.292
    exclamation_cap: int = 4
    normalization_alpha: float = 15.0

    def __post_init__(self):
        if self.normalization_alpha <= 0:
            raise ValidationError("normalization_alpha must be > 0")
        if self.negation_window < 1:
            raise ValidationError("negation_window must be >= 1")
        if self.exclamation_cap < 0:
            raise ValidationError("exclamation_cap must be >= 0")


@dataclass(frozen=True)
class IngestConfig:
    base_url: str = DEFAULT_API_BASE
    page_size: int = 100
    max_retries: int = 3
    backoff_start: float = 1.0  # seconds; doubles per retry
    requests_per_second: float = 1.0
    timeout: float = 30.0

    def resolved_base_url(self) -> str:
        return os.environ.get(API_BASE_ENV_VAR, self.base_url)


@dataclass(frozen=True)
class PreprocessConfig:
    iqr_k: float = 1.5
    min_group_size: int = 5  # sport groups smaller than this are exempt
    train_ratio: float = 0.8


@dataclass(frozen=True)
class ExplainConfig:
    background_cap: int = 100


@dataclass(frozen=True)
class BuzzcastConfig:
    ingest: IngestConfig = field(default_factory=IngestConfig)
    sentiment: RuleConfig = field(default_factory=RuleConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    explain: ExplainConfig = field(default_factory=ExplainConfig)


_SECTIONS = {
    "ingest": IngestConfig,
    "sentiment": RuleConfig,
    "preprocess": PreprocessConfig,
    "explain": ExplainConfig,
}


def load_config(path: str | Path | None) -> BuzzcastConfig:
    """Build a config from defaults, overlaying a TOML file when given."""
    cfg = BuzzcastConfig()
    if path is None:
        return cfg
    raw = Path(path).read_bytes()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError(f"bad config file {path}: {exc}") from exc
    overrides = {}
    for section, values in doc.items():
        if section not in _SECTIONS:
            raise ValidationError(f"unknown config section [{section}]")
        cls = _SECTIONS[section]
        known = {f.name for f in fields(cls)}
        bad = set(values) - known
        if bad:
            raise ValidationError(
                f"unknown keys in [{section}]: {', '.join(sorted(bad))}"
            )
        overrides[section] = replace(getattr(cfg, section), **values)
    return replace(cfg, **overrides)
