"""Pushshift-compatible archive access: HTTP client, fixture client, pagination.

The archive endpoint is ``GET {base_url}/reddit/search/submission/`` with
query params q, subreddit, after, before, size, sort=desc,
sort_type=created_utc and a ``{"data": [...]}`` response body. Bounds are
interpreted as after < created_utc <= before; results are sorted descending
by (created_utc, id) and capped at ``size``.

``fetch_window`` pages through a 72-hour pre-event window by shrinking the
``before`` cursor to the minimum created_utc of each full page. Posts at the
cursor second are re-served on the next page, so results are deduplicated by
id; the final list is ascending by created_utc.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from pathlib import Path
from typing import Callable, Protocol

import requests

from .config import IngestConfig
from .errors import DecodeError, FetchError, ValidationError
from .events import EventSpec, FetchWindow, RawPost, WINDOW_HOURS_DEFAULT, build_query

log = logging.getLogger(__name__)


class ArchiveClient(Protocol):
    def search(self, params: dict) -> list[RawPost]: ...


class TokenBucket:
    """Thread-safe token bucket: at most ``rate`` acquisitions per second.

    Shared across clients so concurrent per-event fetches respect one
    global budget. Clock and sleep are injectable for tests.
    """

    def __init__(
        self,
        rate: float,
        capacity: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValidationError("rate must be positive")
        self.rate = rate
        self.capacity = capacity
        self._clock = clock
        self._sleep = sleep
        self._tokens = capacity
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            # floor keeps rounding from producing a zero-length sleep (spin)
            self._sleep(max(wait, 1e-9))


def decode_post(record: object, index: int) -> RawPost:
    """Decode one submission object; ``selftext`` maps to body, default empty."""
    if not isinstance(record, dict):
        raise DecodeError("submission is not an object", index)
    try:
        body = record.get("selftext", record.get("body", ""))
        post = RawPost(
            id=str(record["id"]),
            title=str(record["title"]),
            body=str(body),
            score=int(record["score"]),
            num_comments=int(record["num_comments"]),
            created_utc=int(record["created_utc"]),
            subreddit=str(record["subreddit"]),
        )
    except KeyError as exc:
        raise DecodeError(f"missing field {exc.args[0]!r}", index) from exc
    except (TypeError, ValueError) as exc:
        raise DecodeError(str(exc), index) from exc
    except ValidationError as exc:
        raise DecodeError(str(exc), index) from exc
    return post


def _decode_page(obj: object, first_index: int) -> list[RawPost]:
    if not isinstance(obj, dict) or not isinstance(obj.get("data"), list):
        raise DecodeError("response must be an object with a 'data' array")
    return [decode_post(rec, first_index + i) for i, rec in enumerate(obj["data"])]


class HttpArchiveClient:
    """HTTP client with retries, exponential backoff, and rate limiting."""

    def __init__(
        self,
        config: IngestConfig | None = None,
        session: requests.Session | None = None,
        rate_limiter: TokenBucket | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config or IngestConfig()
        self.base_url = self.config.resolved_base_url().rstrip("/")
        self.session = session or requests.Session()
        self.rate_limiter = rate_limiter or TokenBucket(self.config.requests_per_second)
        self._sleep = sleep

    @property
    def endpoint(self) -> str:
        return f"{self.base_url}/reddit/search/submission/"

    def search(self, params: dict) -> list[RawPost]:
        attempts = 0
        backoff = self.config.backoff_start
        last_error = "unknown"
        while attempts < self.config.max_retries:
            attempts += 1
            self.rate_limiter.acquire()
            try:
                resp = self.session.get(self.endpoint, params=params, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = str(exc)
            else:
                if resp.status_code == 200:
                    try:
                        payload = resp.json()
                    except ValueError as exc:
                        raise DecodeError(f"response body is not JSON: {exc}") from exc
                    return _decode_page(payload, 0)
                last_error = f"HTTP {resp.status_code}"
            if attempts < self.config.max_retries:
                self._sleep(backoff)
                backoff *= 2
        raise FetchError(f"archive request failed: {last_error}", attempts)


class FixtureArchiveClient:
    """Serves archive queries from in-memory posts, emulating the live API.

    Fixtures are captured per event and already query-scoped, so the ``q``
    param is ignored; subreddit, after/before bounds, size, and descending
    created_utc order are honored.
    """

    def __init__(self, posts: list[RawPost]):
        self.posts = list(posts)

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureArchiveClient":
        return cls(load_posts_fixture(path))

    def search(self, params: dict) -> list[RawPost]:
        after = int(params["after"])
        before = int(params["before"])
        size = int(params.get("size", 100))
        subreddit = params.get("subreddit")
        hits = [
            p
            for p in self.posts
            if after < p.created_utc <= before
            and (subreddit is None or p.subreddit == subreddit)
        ]
        hits.sort(key=lambda p: (p.created_utc, p.id), reverse=True)
        return hits[:size]


def fetch_window(
    spec: EventSpec,
    client: ArchiveClient,
    window_hours: int = WINDOW_HOURS_DEFAULT,
    page_size: int = 100,
) -> list[RawPost]:
    """Collect every matching post in [start - window_hours*3600, start).

    Pages are requested newest-first; the ``before`` cursor shrinks to the
    minimum created_utc of the previous page while pages stay full. Results
    are deduplicated by id and returned ascending by created_utc. Posts at
    exactly the event start are excluded; posts at exactly the window start
    are included.
    """
    window = FetchWindow.preceding(spec, window_hours)
    query = build_query(spec)
    after_param = window.after - 1  # lower bound is exclusive
    before_param = window.before
    seen: dict[str, RawPost] = {}
    pages = 0
    while before_param > after_param:
        page = client.search(
            {
                "q": query,
                "subreddit": spec.subreddit,
                "after": after_param,
                "before": before_param,
                "size": page_size,
                "sort": "desc",
                "sort_type": "created_utc",
            }
        )
        pages += 1
        for post in page:
            if window.contains(post.created_utc) and post.id not in seen:
                seen[post.id] = post
        if len(page) < page_size:
            break
        page_min = min(p.created_utc for p in page)
        # A stuck cursor means >= page_size posts share one second; step past it.
        before_param = page_min if page_min < before_param else before_param - 1
    posts = sorted(seen.values(), key=lambda p: (p.created_utc, p.id))
    log.debug("%s: %d posts across %d page(s)", spec.name, len(posts), pages)
    return posts


def load_posts_fixture(path: str | Path) -> list[RawPost]:
    """Read a fixture file: one response object, or newline-delimited pages.

    Posts are decoded verbatim (no window filtering, duplicates preserved);
    malformed records raise DecodeError with the flat record index.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        pages = [json.loads(text)]
    except json.JSONDecodeError:
        pages = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                pages.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DecodeError(f"{path} line {lineno}: invalid JSON: {exc}") from exc
    posts: list[RawPost] = []
    for page in pages:
        posts.extend(_decode_page(page, len(posts)))
    return posts


def write_posts_fixture(path: str | Path, posts: list[RawPost], page_size: int | None = None) -> None:
    """Write posts in the archive response format, optionally paged per line."""
    records = [
        {
            "id": p.id,
            "title": p.title,
            "selftext": p.body,
            "score": p.score,
            "num_comments": p.num_comments,
            "created_utc": p.created_utc,
            "subreddit": p.subreddit,
        }
        for p in posts
    ]
    if page_size is None:
        chunks = [records]
    else:
        chunks = [records[i : i + page_size] for i in range(0, len(records), page_size)] or [[]]
    lines = [json.dumps({"data": chunk}, sort_keys=True, separators=(",", ":")) for chunk in chunks]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
