"""Append-only store of timestamped search-result snapshots.

Snapshots for the same query are retained forever, never overwritten; the
point of the cache is the longitudinal corpus it accumulates. Backed by an
embedded relational store with a snapshot-header table and a result-row
table. Writes are serialized through a single lock; reads may proceed
concurrently and always observe a consistent set.
"""

from __future__ import annotations

import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from .entity_index import normalize_token
from .errors import SnapshotConflictError
from .search_gateway import SearchResult, entity_slug, write_result_file

QueryKey = tuple[str, str]  # (normalized entity title, language)


def make_query_key(entity_title: str, language: str) -> QueryKey:
    return (normalize_token(entity_title), language)


@dataclass(frozen=True)
class CachedResultSet:
    """The full ranked result list stored for one (query, retrieval time)."""

    query_key: QueryKey
    retrieved_at: datetime
    results: tuple[SearchResult, ...]
    provider_id: str

    def __post_init__(self):
        for i, result in enumerate(self.results, start=1):
            if result.rank != i:
                raise ValueError(f"ranks must be consecutive from 1, got {result.rank} at {i}")


@dataclass(frozen=True)
class RefreshPolicy:
    """When cached queries are re-fetched.

    A key is due once its newest snapshot is older than ``interval`` (a
    30-day rolling window by default) or missing entirely. The seed list
    carries the standing query corpus; queries users issued are included
    too unless ``include_user_queries`` is off.
    """

    interval: timedelta = timedelta(days=30)
    seed_list: tuple[str, ...] = ()
    seed_language: str = "en"
    include_user_queries: bool = True

    def __post_init__(self):
        if self.interval <= timedelta(0):
            raise ValueError(f"interval must be positive, got {self.interval}")

    def seed_keys(self) -> list[QueryKey]:
        return [make_query_key(title, self.seed_language) for title in self.seed_list]


_SCHEMA = """
CREATE TABLE IF NOT EXISTS snapshots (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    entity_title TEXT NOT NULL,
    language TEXT NOT NULL,
    retrieved_at TEXT NOT NULL,
    provider_id TEXT NOT NULL,
    UNIQUE (entity_title, language, retrieved_at)
);
CREATE TABLE IF NOT EXISTS snapshot_results (
    snapshot_id INTEGER NOT NULL REFERENCES snapshots (id),
    rank INTEGER NOT NULL,
    url TEXT NOT NULL,
    title TEXT NOT NULL,
    snippet TEXT NOT NULL,
    PRIMARY KEY (snapshot_id, rank)
);
"""


class ResultCache:
    """SQLite-backed snapshot store. Pass ":memory:" for an ephemeral cache."""

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._write_lock = threading.Lock()
        with self._conn:
            self._conn.executescript(_SCHEMA)

    def close(self):
        self._conn.close()

    def put_snapshot(self, snapshot: CachedResultSet) -> int:
        """Store a snapshot durably; prior snapshots for the key are retained.

        Raises :class:`SnapshotConflictError` when a snapshot with the same
        key and retrieval time already exists.
        """
        title, language = snapshot.query_key
        with self._write_lock:
            try:
                with self._conn:
                    cursor = self._conn.execute(
                        "INSERT INTO snapshots (entity_title, language, retrieved_at, provider_id)"
                        " VALUES (?, ?, ?, ?)",
                        (title, language, snapshot.retrieved_at.isoformat(), snapshot.provider_id),
                    )
                    snapshot_id = cursor.lastrowid
                    self._conn.executemany(
                        "INSERT INTO snapshot_results (snapshot_id, rank, url, title, snippet)"
                        " VALUES (?, ?, ?, ?, ?)",
                        [
                            (snapshot_id, r.rank, r.url, r.title, r.snippet)
                            for r in snapshot.results
                        ],
                    )
            except sqlite3.IntegrityError as exc:
                raise SnapshotConflictError(
                    f"snapshot for {snapshot.query_key} at "
                    f"{snapshot.retrieved_at.isoformat()} already stored"
                ) from exc
        return snapshot_id

    def get_latest(self, query_key: QueryKey) -> CachedResultSet | None:
        """The snapshot with the greatest retrieved_at for the key, or None."""
        snapshots = self.list_snapshots(query_key)
        return snapshots[-1] if snapshots else None

    def list_snapshots(self, query_key: QueryKey) -> list[CachedResultSet]:
        """All snapshots for the key, ascending by retrieved_at."""
        title, language = query_key
        rows = self._conn.execute(
            "SELECT id, retrieved_at, provider_id FROM snapshots"
            " WHERE entity_title = ? AND language = ? ORDER BY retrieved_at",
            (title, language),
        ).fetchall()
        return [self._hydrate(query_key, *row) for row in rows]

    def _hydrate(
        self, query_key: QueryKey, snapshot_id: int, retrieved_at: str, provider_id: str
    ) -> CachedResultSet:
        result_rows = self._conn.execute(
            "SELECT rank, url, title, snippet FROM snapshot_results"
            " WHERE snapshot_id = ? ORDER BY rank",
            (snapshot_id,),
        ).fetchall()
        return CachedResultSet(
            query_key=query_key,
            retrieved_at=datetime.fromisoformat(retrieved_at),
            results=tuple(SearchResult(*row) for row in result_rows),
            provider_id=provider_id,
        )

    def keys(self) -> list[QueryKey]:
        rows = self._conn.execute(
            "SELECT DISTINCT entity_title, language FROM snapshots"
            " ORDER BY entity_title, language"
        ).fetchall()
        return [tuple(row) for row in rows]

    def all_snapshots(self) -> list[CachedResultSet]:
        return [s for key in self.keys() for s in self.list_snapshots(key)]

    def refresh_due(self, policy: RefreshPolicy, now: datetime) -> list[QueryKey]:
        """Keys whose latest snapshot is older than the interval or missing."""
        candidates = dict.fromkeys(policy.seed_keys())
        if policy.include_user_queries:
            candidates.update(dict.fromkeys(self.keys()))
        due = []
        for key in candidates:
            latest = self.get_latest(key)
            if latest is None or now - latest.retrieved_at > policy.interval:
                due.append(key)
        return due

    def export(self, out_dir: str | Path) -> Path:
        """Write one result TSV per snapshot plus a manifest for analytics.

        The per-snapshot files use the fixture-provider line format; the
        manifest lists query, language, retrieved_at and file name.
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest_lines = []
        for snapshot in self.all_snapshots():
            title, language = snapshot.query_key
            stamp = snapshot.retrieved_at.strftime("%Y-%m-%dT%H%M%S")
            name = f"{entity_slug(title)}__{language}__{stamp}.tsv"
            write_result_file(out_dir / name, list(snapshot.results))
            manifest_lines.append(
                f"{title}\t{language}\t{snapshot.retrieved_at.isoformat()}\t{name}"
            )
        manifest_path = out_dir / "manifest.tsv"
        manifest_path.write_text(
            "".join(line + "\n" for line in manifest_lines), encoding="utf-8"
        )
        return manifest_path
