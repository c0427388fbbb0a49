"""Event identities, archived posts, and the viewership CSV loader."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import RowError, SchemaError, ValidationError

WINDOW_HOURS_DEFAULT = 72


class Sport(enum.Enum):
    WORLD_SERIES = "World_Series"
    SUPER_BOWL = "Super_Bowl"
    NBA_FINALS = "NBA_Finals"
    STANLEY_CUP = "Stanley_Cup"
    MLS_CUP = "MLS_Cup"

    @classmethod
    def parse(cls, text: str) -> "Sport":
        for sport in cls:
            if sport.value == text:
                return sport
        raise ValidationError(f"unknown sport {text!r}")


# Query titles are the broad event names, not game-specific labels, so that
# colloquial discussion is captured.
QUERY_TITLES = {
    Sport.WORLD_SERIES: "World Series",
    Sport.SUPER_BOWL: "Super Bowl",
    Sport.NBA_FINALS: "NBA Finals",
    Sport.STANLEY_CUP: "Stanley Cup",
    Sport.MLS_CUP: "MLS Cup",
}


@dataclass(frozen=True)
class EventSpec:
    """One televised event: identity, teams, kickoff time, and query metadata."""

    name: str
    sport: Sport
    teams: tuple[str, ...]
    start_time: int  # UTC epoch seconds
    subreddit: str
    event_title: str

    def __post_init__(self):
        if self.start_time <= 0:
            raise ValidationError(f"{self.name}: start_time must be > 0")
        if not self.event_title:
            raise ValidationError(f"{self.name}: event_title must be non-empty")


@dataclass(frozen=True)
class RawPost:
    """One archived submission as returned by the archive API."""

    id: str
    title: str
    body: str
    score: int
    num_comments: int
    created_utc: int
    subreddit: str

    def __post_init__(self):
        if self.num_comments < 0:
            raise ValidationError(f"post {self.id}: num_comments must be >= 0")


@dataclass(frozen=True)
class LabeledEvent:
    spec: EventSpec
    avg_viewers_millions: float

    def __post_init__(self):
        if self.avg_viewers_millions < 0:
            raise ValidationError(
                f"{self.spec.name}: avg_viewers_millions must be >= 0"
            )


@dataclass(frozen=True)
class FetchWindow:
    """Half-open collection window [after, before) in epoch seconds."""

    after: int
    before: int

    def __post_init__(self):
        if self.after >= self.before:
            raise ValidationError("window after must precede before")

    @classmethod
    def preceding(cls, spec: EventSpec, window_hours: int = WINDOW_HOURS_DEFAULT) -> "FetchWindow":
        """The window ending at the event start; default 72 hours."""
        if window_hours <= 0:
            raise ValidationError("window_hours must be positive")
        return cls(after=spec.start_time - window_hours * 3600, before=spec.start_time)

    def contains(self, created_utc: int) -> bool:
        return self.after <= created_utc < self.before

    @property
    def hours(self) -> float:
        return (self.before - self.after) / 3600


def build_query(spec: EventSpec) -> str:
    """Search string for an event: quoted title OR each team abbreviation.

    e.g. '"World Series" OR "LAD" OR "NYY"'.
    """
    if not spec.event_title:
        raise ValidationError("event_title must be non-empty")
    terms = [spec.event_title, *spec.teams]
    return " OR ".join(f'"{term}"' for term in terms)


VIEWERSHIP_COLUMNS = [
    "name",
    "sport",
    "year",
    "teams",
    "start_time",
    "subreddit",
    "avg_viewers_millions",
]


def load_viewership_csv(path: str | Path) -> list[LabeledEvent]:
    """Read the ground-truth events CSV into LabeledEvents.

    Header must match VIEWERSHIP_COLUMNS exactly; teams are
    semicolon-separated; start_time is ISO-8601 with an explicit UTC offset.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise SchemaError(f"{path}: empty file, expected header")
        if list(header) != VIEWERSHIP_COLUMNS:
            missing = [c for c in VIEWERSHIP_COLUMNS if c not in header]
            if missing:
                raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
            raise SchemaError(
                f"{path}: header must be exactly {','.join(VIEWERSHIP_COLUMNS)}"
            )
        events = []
        for lineno, row in enumerate(reader, start=2):
            events.append(_parse_event_row(row, lineno))
    return events


def _parse_event_row(row: dict, lineno: int) -> LabeledEvent:
    try:
        sport = Sport.parse(row["sport"])
    except ValidationError as exc:
        raise RowError(lineno, str(exc)) from exc
    try:
        int(row["year"])
    except ValueError as exc:
        raise RowError(lineno, f"bad year {row['year']!r}") from exc
    try:
        dt = datetime.fromisoformat(row["start_time"])
    except ValueError as exc:
        raise RowError(lineno, f"bad start_time {row['start_time']!r}") from exc
    if dt.tzinfo is None:
        raise RowError(lineno, f"start_time {row['start_time']!r} lacks a UTC offset")
    try:
        viewers = float(row["avg_viewers_millions"])
    except ValueError as exc:
        raise RowError(
            lineno, f"bad avg_viewers_millions {row['avg_viewers_millions']!r}"
        ) from exc
    teams = tuple(t for t in row["teams"].split(";") if t)
    try:
        spec = EventSpec(
            name=row["name"],
            sport=sport,
            teams=teams,
            start_time=int(dt.timestamp()),
            subreddit=row["subreddit"],
            event_title=QUERY_TITLES[sport],
        )
        return LabeledEvent(spec=spec, avg_viewers_millions=viewers)
    except ValidationError as exc:
        raise RowError(lineno, str(exc)) from exc


def event_slug(name: str) -> str:
    """Filesystem-safe key for an event name (fixture file naming)."""
    out = []
    for ch in name.lower():
        out.append(ch if ch.isalnum() else "_")
    slug = "".join(out)
    while "__" in slug:
        slug = slug.replace("__", "_")
    return slug.strip("_")
