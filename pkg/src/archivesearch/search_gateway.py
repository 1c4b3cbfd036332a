"""Search retrieval through a pluggable provider, plus archive linking.

Two provider implementations share one contract: a deterministic fixture
adapter that replays recorded result files (used by all tests and the demo)
and a live HTTP adapter shaped for a Bing-compatible endpoint. Every result
URL is linked to its archived versions through a CDX-style client that asks
the archive for exactly two timestamps per URL (earliest and latest
capture), since full capture lists can be very large.
"""

from __future__ import annotations

import os
import time
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Optional, Protocol
from urllib.parse import quote, urlsplit, urlunsplit

import requests

from .errors import (
    IngestionError,
    ProtocolError,
    ProviderError,
    TransportError,
    UrlNormalizationError,
)

logger = logging.getLogger(__name__)

RESULTS_PER_PAGE = 10
MAX_PAGE = 5

_DEFAULT_PORTS = {"http": "80", "https": "443"}


def normalize_url(url: str) -> str:
    """Canonicalize an absolute URL for cache keys and overlap comparison.

    Lowercases scheme and host, drops the fragment and default ports, and
    leaves path and query byte-exact. Idempotent.
    """
    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise UrlNormalizationError(f"unparseable URL {url!r}: {exc}") from exc
    if not parts.scheme or not parts.netloc:
        raise UrlNormalizationError(f"not an absolute URL: {url!r}")
    scheme = parts.scheme.lower()
    netloc = parts.netloc
    userinfo, sep, hostport = netloc.rpartition("@")
    if hostport.startswith("["):
        host, _, port_part = hostport.partition("]")
        host = (host + "]").lower()
        port = port_part.lstrip(":")
    else:
        host, _, port = hostport.partition(":")
        host = host.lower()
    if port and port == _DEFAULT_PORTS.get(scheme):
        port = ""
    rebuilt = (userinfo + sep if sep else "") + host + (f":{port}" if port else "")
    return urlunsplit((scheme, rebuilt, parts.path, parts.query, ""))


@dataclass(frozen=True)
class SearchQuery:
    """One (entity, language) request for a single result page."""

    entity_title: str
    language: str
    market: str | None = None
    page: int = 1

    def __post_init__(self):
        if not self.entity_title:
            raise ValueError("entity_title must be non-empty")
        if not 1 <= self.page <= MAX_PAGE:
            raise ValueError(f"page must be in [1, {MAX_PAGE}], got {self.page}")


@dataclass(frozen=True)
class SearchResult:
    rank: int
    url: str
    title: str
    snippet: str

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")
        # raises UrlNormalizationError for non-absolute URLs
        normalize_url(self.url)


@dataclass(frozen=True)
class SearchResultSet:
    """Ranked, timestamped results for one (entity, language) query page.

    Ranks are consecutive and unique, offset by (page - 1) * 10 so that the
    concatenation of pages 1..5 is ranked 1..50.
    """

    entity_title: str
    language: str
    page: int
    results: tuple[SearchResult, ...]
    retrieved_at: datetime
    provider_id: str = "unknown"

    def __post_init__(self):
        expected = (self.page - 1) * RESULTS_PER_PAGE + 1
        for result in self.results:
            if result.rank != expected:
                raise ValueError(
                    f"ranks must be consecutive from {(self.page - 1) * RESULTS_PER_PAGE + 1}; "
                    f"expected {expected}, got {result.rank}"
                )
            expected += 1


class SearchProvider(Protocol):
    """Contract every search backend satisfies.

    ``fetch`` returns the full ranked list for an entity (up to 50 results,
    ranks consecutive from 1); the gateway slices pages out of it.
    """

    provider_id: str

    def fetch(
        self, entity_title: str, language: str, market: str | None = None
    ) -> list[SearchResult]: ...


def entity_slug(entity_title: str) -> str:
    """Filesystem-safe name for an entity title: case-folded, spaces to underscores."""
    return entity_title.casefold().replace(" ", "_").replace("/", "_")


class FixtureSearchProvider:
    """Replays recorded result files.

    One result set per file, named ``<entity>__<lang>__<ISO-date>.tsv`` with
    lines ``rank <TAB> url <TAB> title <TAB> snippet``. When several dates
    exist for an entity the newest file wins. Unknown entities yield an
    empty list, not an error.
    """

    provider_id = "fixture"

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def fetch(
        self, entity_title: str, language: str, market: str | None = None
    ) -> list[SearchResult]:
        pattern = f"{entity_slug(entity_title)}__{language}__*.tsv"
        matches = sorted(self.root.glob(pattern))
        if not matches:
            return []
        return load_result_file(matches[-1])

    def available_dates(self, entity_title: str, language: str) -> list[str]:
        pattern = f"{entity_slug(entity_title)}__{language}__*.tsv"
        return [p.stem.rsplit("__", 1)[-1] for p in sorted(self.root.glob(pattern))]


def load_result_file(path: str | Path) -> list[SearchResult]:
    """Parse a recorded result TSV; ranks must be consecutive from 1."""
    path = Path(path)
    results: list[SearchResult] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise IngestionError(
                    f"expected 4 tab-separated fields, got {len(fields)}",
                    path=str(path),
                    line=lineno,
                )
            try:
                result = SearchResult(
                    rank=int(fields[0]), url=fields[1], title=fields[2], snippet=fields[3]
                )
            except (ValueError, UrlNormalizationError) as exc:
                raise IngestionError(str(exc), path=str(path), line=lineno) from exc
            if result.rank != len(results) + 1:
                raise IngestionError(
                    f"ranks must be consecutive from 1, got {result.rank}",
                    path=str(path),
                    line=lineno,
                )
            results.append(result)
    return results


def write_result_file(path: str | Path, results: list[SearchResult]):
    """Inverse of :func:`load_result_file`; used by the cache export."""
    lines = [f"{r.rank}\t{r.url}\t{r.title}\t{r.snippet}" for r in results]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


class LiveSearchProvider:
    """HTTP adapter for a Bing-compatible web-results endpoint.

    Sends ``q``, ``mkt`` and ``count`` query parameters with the API key in
    the ``Ocp-Apim-Subscription-Key`` header, and maps the JSON payload's
    ``webPages.value`` entries (url, name, snippet) onto ranked results.
    Credentials come from the ARCHIVESEARCH_PROVIDER_KEY environment
    variable; never exercised in CI.
    """

    provider_id = "live"

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        timeout: float = 5.0,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.api_key = api_key or os.environ.get("ARCHIVESEARCH_PROVIDER_KEY", "")
        self.timeout = timeout
        self.session = session or requests.Session()

    def fetch(
        self, entity_title: str, language: str, market: str | None = None
    ) -> list[SearchResult]:
        params = {
            "q": entity_title,
            "mkt": market or f"{language}-{language.upper()}",
            "count": str(RESULTS_PER_PAGE * MAX_PAGE),
        }
        try:
            response = self.session.get(
                self.endpoint,
                params=params,
                headers={"Ocp-Apim-Subscription-Key": self.api_key},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"provider unreachable: {exc}", url=self.endpoint) from exc
        if response.status_code != 200:
            raise ProviderError(
                f"provider rejected query ({response.status_code}): {response.text[:200]}"
            )
        try:
            entries = response.json()["webPages"]["value"]
            return [
                SearchResult(
                    rank=i + 1,
                    url=entry["url"],
                    title=entry["name"],
                    snippet=entry.get("snippet", ""),
                )
                for i, entry in enumerate(entries)
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed provider payload: {exc}") from exc


def search(query: SearchQuery, provider: SearchProvider) -> SearchResultSet:
    """Retrieve one page (up to 10 results) for an entity query.

    The provider supplies the full ranked list; the requested page is sliced
    out of it, so ranks carry the (page - 1) * 10 offset. Empty results are
    an empty set, not an error.
    """
    all_results = provider.fetch(query.entity_title, query.language, query.market)
    start = (query.page - 1) * RESULTS_PER_PAGE
    page_results = tuple(all_results[start : start + RESULTS_PER_PAGE])
    return SearchResultSet(
        entity_title=query.entity_title,
        language=query.language,
        page=query.page,
        results=page_results,
        retrieved_at=utc_now(),
        provider_id=provider.provider_id,
    )


# --- archive client -----------------------------------------------------

TS14_FORMAT = "%Y%m%d%H%M%S"


def format_ts14(moment: datetime) -> str:
    """14-digit capture timestamp (YYYYMMDDhhmmss, UTC)."""
    if moment.tzinfo is not None:
        moment = moment.astimezone(timezone.utc)
    return moment.strftime(TS14_FORMAT)


def parse_ts14(text: str) -> datetime:
    if len(text) != 14 or not text.isdigit():
        raise ProtocolError(f"not a 14-digit capture timestamp: {text!r}")
    try:
        return datetime.strptime(text, TS14_FORMAT).replace(tzinfo=timezone.utc)
    except ValueError as exc:
        raise ProtocolError(f"invalid capture timestamp {text!r}: {exc}") from exc


def utc_now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


@dataclass(frozen=True)
class ArchiveSpan:
    """First and last capture timestamps for a URL."""

    url: str
    first_capture: datetime | None = None
    last_capture: datetime | None = None

    def __post_init__(self):
        if (self.first_capture is None) != (self.last_capture is None):
            raise ValueError("first_capture and last_capture must be present together")
        if self.first_capture is not None and self.first_capture > self.last_capture:
            raise ValueError("first_capture must not exceed last_capture")

    @property
    def archived(self) -> bool:
        return self.first_capture is not None


class CdxArchiveClient:
    """Talks to a CDX-style endpoint returning one capture timestamp per line.

    ``GET <endpoint>?url=<u>&order=asc|desc&limit=1`` serves the span
    queries and ``GET <endpoint>?url=<u>&from=<ts>&to=<ts>`` the window
    queries. Failed requests are retried once with exponential backoff.
    """

    def __init__(
        self,
        endpoint: str,
        replay_template: str = "https://web.archive.org/web/{timestamp}/{url}",
        timeout: float = 5.0,
        retries: int = 1,
        backoff: float = 0.25,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint
        self.replay_template = replay_template
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()

    def replay_url(self, capture: datetime, url: str) -> str:
        return self.replay_template.format(timestamp=format_ts14(capture), url=url)

    def _get(self, params: dict[str, str], url: str) -> list[datetime]:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                response = self.session.get(self.endpoint, params=params, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                last_error = TransportError(
                    f"archive returned {response.status_code}", url=url
                )
                continue
            return [
                parse_ts14(line.strip())
                for line in response.text.splitlines()
                if line.strip()
            ]
        raise TransportError(f"archive lookup failed for {url!r}: {last_error}", url=url)

    def earliest(self, url: str) -> datetime | None:
        captures = self._get({"url": url, "order": "asc", "limit": "1"}, url)
        return captures[0] if captures else None

    def latest(self, url: str) -> datetime | None:
        captures = self._get({"url": url, "order": "desc", "limit": "1"}, url)
        return captures[0] if captures else None

    def between(self, url: str, start: datetime, end: datetime) -> list[datetime]:
        captures = self._get(
            {"url": url, "from": format_ts14(start), "to": format_ts14(end)}, url
        )
        return sorted(captures)


def archive_span(url: str, client: CdxArchiveClient) -> ArchiveSpan:
    """The capture span for a URL, using exactly two upstream requests."""
    first = client.earliest(url)
    last = client.latest(url)
    if (first is None) != (last is None):
        raise ProtocolError(f"archive reported a half-open span for {url!r}")
    return ArchiveSpan(url=url, first_capture=first, last_capture=last)


def captures_around(
    url: str, timepoint: datetime, window: timedelta, client: CdxArchiveClient
) -> list[datetime]:
    """Captures within [timepoint - window, timepoint + window], ascending."""
    if window <= timedelta(0):
        raise ValueError(f"window must be a positive duration, got {window}")
    start, end = timepoint - window, timepoint + window
    return [c for c in client.between(url, start, end) if start <= c <= end]


@dataclass(frozen=True)
class LinkedResult:
    """A search result paired with its live ("blue") and archive ("green") links.

    ``lookup_failed`` marks rows whose archive lookup broke; their archived
    state is unknown rather than false, and the rest of the set is intact.
    """

    result: SearchResult
    live_link: str
    archive_link: str | None = None
    span: ArchiveSpan | None = None
    lookup_failed: bool = False

    def __post_init__(self):
        has_span = self.span is not None and self.span.archived
        if (self.archive_link is not None) != has_span:
            raise ValueError("archive_link must be present exactly when the span is archived")


def link_results(
    result_set: SearchResultSet,
    client: CdxArchiveClient,
    timepoint: datetime | None = None,
    window: timedelta | None = None,
    max_concurrency: int = 4,
) -> list[LinkedResult]:
    """Pair every result with its archive span, preserving input order.

    The green link targets the most recent capture; when a timepoint is
    given, the capture nearest to it within the window is preferred. Rows
    whose archive lookup fails degrade to ``lookup_failed`` without sinking
    the rest of the set. Lookups run concurrently up to ``max_concurrency``.
    """
    if timepoint is not None and window is None:
        window = timedelta(days=30)

    def link_one(result: SearchResult) -> LinkedResult:
        try:
            span = archive_span(result.url, client)
            archive_link = None
            if span.archived:
                chosen = span.last_capture
                if timepoint is not None:
                    nearby = captures_around(result.url, timepoint, window, client)
                    if nearby:
                        chosen = min(nearby, key=lambda c: abs(c - timepoint))
                archive_link = client.replay_url(chosen, result.url)
            return LinkedResult(
                result=result, live_link=result.url, archive_link=archive_link, span=span
            )
        except (TransportError, ProtocolError) as exc:
            logger.warning("archive lookup failed for %s: %s", result.url, exc)
            return LinkedResult(result=result, live_link=result.url, lookup_failed=True)

    if not result_set.results:
        return []
    workers = max(1, min(max_concurrency, len(result_set.results)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(link_one, result_set.results))
