"""HTTP API service composing index, graph, gateway, cache and analytics.

Handlers are stateless per request: shared state is limited to immutable
index/graph references (swappable atomically by replacing the state object)
and the serialized-writer cache. Only query keys are logged, never client
identifiers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import entity_graph, entity_index, result_cache, search_gateway
from .config import ServiceConfig
from .errors import (
    ArchiveSearchError,
    ConfigError,
    EntityNotFoundError,
    IngestionError,
    ProtocolError,
    ProviderError,
    SnapshotConflictError,
    TransportError,
    UrlNormalizationError,
)

logger = logging.getLogger(__name__)


@dataclass
class LanguageState:
    index: entity_index.EntityIndex
    graph: entity_graph.LinkGraph
    records_by_title: dict[str, entity_index.EntityRecord]
    records_by_id: dict[str, entity_index.EntityRecord]
    popularity: dict[str, int]


@dataclass
class AppState:
    config: ServiceConfig
    languages: dict[str, LanguageState]
    interlang: entity_graph.InterLanguageMap
    cache: result_cache.ResultCache
    provider: search_gateway.SearchProvider
    archive: search_gateway.CdxArchiveClient
    refresh_interval: timedelta


def _load_views(path: Path) -> dict[str, int]:
    views: dict[str, int] = {}
    if not path.exists():
        return views
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise IngestionError(
                    f"expected 'entity_id<TAB>views', got {line!r}",
                    path=str(path),
                    line=lineno,
                )
            views[fields[0]] = int(fields[1])
    return views


def build_state(config: ServiceConfig) -> AppState:
    """Load all configured data files and assemble the serving state.

    Raises :class:`ConfigError` or :class:`IngestionError` naming the bad
    path, so startup fails fast.
    """
    config.validate()
    languages: dict[str, LanguageState] = {}
    for lang in config.languages:
        records = entity_index.load_entities(config.entities_path(lang))
        views = _load_views(config.views_path(lang))
        if views:
            records = [
                entity_index.EntityRecord(
                    entity_id=r.entity_id,
                    canonical_title=r.canonical_title,
                    language=r.language,
                    redirect_titles=r.redirect_titles,
                    cumulative_views=views.get(r.entity_id, 0),
                    category=r.category,
                )
                for r in records
            ]
        index = entity_index.build_index(records)
        graph = entity_graph.load_graph_file(config.links_path(lang), language=lang)
        languages[lang] = LanguageState(
            index=index,
            graph=graph,
            records_by_title={
                entity_index.normalize_token(r.canonical_title): r for r in records
            },
            records_by_id={r.entity_id: r for r in records},
            popularity={r.entity_id: r.cumulative_views for r in records},
        )
    interlang_path = config.interlang_path()
    interlang = (
        entity_graph.load_interlanguage(interlang_path)
        if interlang_path.exists()
        else entity_graph.InterLanguageMap()
    )
    if config.provider == "live":
        if not config.provider_endpoint:
            raise ConfigError("provider 'live' requires provider_endpoint")
        provider: search_gateway.SearchProvider = search_gateway.LiveSearchProvider(
            config.provider_endpoint, timeout=config.timeout_seconds
        )
    else:
        provider = search_gateway.FixtureSearchProvider(config.results_dir())
    archive = search_gateway.CdxArchiveClient(
        config.archive_endpoint,
        replay_template=config.archive_replay_template,
        timeout=config.timeout_seconds,
    )
    return AppState(
        config=config,
        languages=languages,
        interlang=interlang,
        cache=result_cache.ResultCache(config.cache_path),
        provider=provider,
        archive=archive,
        refresh_interval=timedelta(days=config.refresh_interval_days),
    )


def _parse_timepoint(value: str) -> datetime:
    try:
        moment = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise HTTPException(400, f"invalid timepoint {value!r}: {exc}") from exc
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment


def fetch_results(state: AppState, entity: str, language: str) -> result_cache.CachedResultSet:
    """Cache-first retrieval of the full result list for one query key.

    A fresh snapshot (younger than the refresh interval) is served as-is;
    otherwise the provider is called once and the new snapshot stored.
    """
    key = result_cache.make_query_key(entity, language)
    now = search_gateway.utc_now()
    latest = state.cache.get_latest(key)
    if latest is not None and now - latest.retrieved_at <= state.refresh_interval:
        return latest
    logger.info("fetching provider results for %s", key)
    results = state.provider.fetch(entity, language)
    snapshot = result_cache.CachedResultSet(
        query_key=key,
        retrieved_at=now,
        results=tuple(results),
        provider_id=state.provider.provider_id,
    )
    try:
        state.cache.put_snapshot(snapshot)
    except SnapshotConflictError:
        # concurrent refresh stored the same second's snapshot first
        return state.cache.get_latest(key)
    return snapshot


def _iso(moment: datetime | None) -> str | None:
    return moment.isoformat() if moment is not None else None


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="archivesearch")
    app.state.search = state

    def language_state(lang: str | None) -> tuple[str, LanguageState]:
        if not lang:
            raise HTTPException(400, "missing required parameter: lang")
        current = app.state.search
        if lang not in current.languages:
            raise HTTPException(400, f"unknown language {lang!r}")
        return lang, current.languages[lang]

    @app.exception_handler(ArchiveSearchError)
    async def archivesearch_error(_, exc: ArchiveSearchError):
        status = 502 if isinstance(exc, (TransportError, ProviderError, ProtocolError)) else 500
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/healthz")
    def healthz():
        current = app.state.search
        return {
            "status": "ok",
            "provider": current.provider.provider_id,
            "languages": {
                lang: {
                    "entities": ls.index.entity_count,
                    "variants": ls.index.variant_count,
                    "graph_entities": len(ls.graph.inlinks),
                }
                for lang, ls in current.languages.items()
            },
        }

    @app.get("/api/suggest")
    def suggest(q: str | None = None, lang: str | None = None, limit: int | None = None):
        if q is None:
            raise HTTPException(400, "missing required parameter: q")
        lang, ls = language_state(lang)
        limit = limit or app.state.search.config.suggest_limit
        if limit < 1:
            raise HTTPException(400, "limit must be >= 1")
        suggestions = ls.index.suggest(q, limit)
        return {
            "query": q,
            "language": lang,
            "suggestions": [
                {
                    "entity_id": s.entity_id,
                    "title": s.display_title,
                    "views": s.cumulative_views,
                    "matched_surface": s.matched_surface,
                }
                for s in suggestions
            ],
        }

    @app.get("/api/search")
    def search(
        entity: str | None = None,
        lang: str | None = None,
        page: int = 1,
        timepoint: str | None = None,
    ):
        if entity is None:
            raise HTTPException(400, "missing required parameter: entity")
        lang, _ = language_state(lang)
        if not 1 <= page <= search_gateway.MAX_PAGE:
            raise HTTPException(400, f"page must be in [1, {search_gateway.MAX_PAGE}]")
        current = app.state.search
        moment = _parse_timepoint(timepoint) if timepoint else None
        snapshot = fetch_results(current, entity, lang)
        start = (page - 1) * search_gateway.RESULTS_PER_PAGE
        page_results = snapshot.results[start : start + search_gateway.RESULTS_PER_PAGE]
        result_set = search_gateway.SearchResultSet(
            entity_title=entity,
            language=lang,
            page=page,
            results=page_results,
            retrieved_at=snapshot.retrieved_at,
            provider_id=snapshot.provider_id,
        )
        linked = search_gateway.link_results(
            result_set,
            current.archive,
            timepoint=moment,
            max_concurrency=current.config.archive_concurrency,
        )
        return {
            "entity": entity,
            "language": lang,
            "page": page,
            "retrieved_at": _iso(snapshot.retrieved_at),
            "provider_id": snapshot.provider_id,
            "total_cached_results": len(snapshot.results),
            "results": [
                {
                    "rank": row.result.rank,
                    "title": row.result.title,
                    "snippet": row.result.snippet,
                    "live_link": row.live_link,
                    "archive_link": row.archive_link,
                    "archived": row.span.archived if row.span else None,
                    "first_capture": _iso(row.span.first_capture) if row.span else None,
                    "last_capture": _iso(row.span.last_capture) if row.span else None,
                    "lookup_failed": row.lookup_failed,
                }
                for row in linked
            ],
        }

    @app.get("/api/related")
    def related(entity: str | None = None, lang: str | None = None, limit: int | None = None):
        if entity is None:
            raise HTTPException(400, "missing required parameter: entity")
        lang, ls = language_state(lang)
        limit = limit or app.state.search.config.related_limit
        record = ls.records_by_title.get(entity_index.normalize_token(entity))
        entity_id = record.entity_id if record else entity
        try:
            scored = entity_graph.related_entities(
                entity_id, ls.graph, limit, popularity=ls.popularity
            )
        except EntityNotFoundError as exc:
            raise HTTPException(404, str(exc)) from exc
        return {
            "entity": entity,
            "language": lang,
            "related": [
                {
                    "entity_id": eid,
                    "title": (
                        ls.records_by_id[eid].canonical_title
                        if eid in ls.records_by_id
                        else eid
                    ),
                    "score": score,
                    "views": ls.popularity.get(eid, 0),
                }
                for eid, score in scored
            ],
        }

    @app.get("/api/archive")
    def archive(
        url: str | None = None,
        timepoint: str | None = None,
        window_days: int = 30,
    ):
        if url is None:
            raise HTTPException(400, "missing required parameter: url")
        try:
            search_gateway.normalize_url(url)
        except UrlNormalizationError as exc:
            raise HTTPException(400, str(exc)) from exc
        current = app.state.search
        if timepoint is None:
            span = search_gateway.archive_span(url, current.archive)
            return {
                "url": url,
                "archived": span.archived,
                "first_capture": _iso(span.first_capture),
                "last_capture": _iso(span.last_capture),
            }
        moment = _parse_timepoint(timepoint)
        if window_days < 1:
            raise HTTPException(400, "window_days must be >= 1")
        captures = search_gateway.captures_around(
            url, moment, timedelta(days=window_days), current.archive
        )
        return {
            "url": url,
            "timepoint": moment.isoformat(),
            "window_days": window_days,
            "captures": [c.isoformat() for c in captures],
        }

    @app.get("/api/interlanguage")
    def interlanguage(
        title: str | None = None,
        from_lang: str | None = Query(None, alias="from"),
        to_lang: str | None = Query(None, alias="to"),
    ):
        if title is None or from_lang is None or to_lang is None:
            raise HTTPException(400, "required parameters: title, from, to")
        if from_lang == to_lang:
            raise HTTPException(400, "from and to languages must differ")
        mapped = app.state.search.interlang.lookup(title, from_lang, to_lang)
        return {"title": title, "from": from_lang, "to": to_lang, "mapped_title": mapped}

    static_dir = state.config.static_dir
    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(config: ServiceConfig):
    """Build state, create the app and run it; import kept local so the
    service module stays importable without uvicorn installed."""
    import uvicorn

    state = build_state(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
