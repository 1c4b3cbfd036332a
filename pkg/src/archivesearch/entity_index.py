"""Autocompletion index over Wikipedia entities.

Entities are indexed under several surface strings: the normalized title,
every token-boundary suffix of it, and accent-folded duplicates, so that a
user typing "schroder" still reaches "Gerhard Schröder". Lookups walk an
immutable prefix tree whose nodes carry the entities below them pre-sorted
by popularity, so a query costs prefix length plus result count, never a
corpus scan.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path

from .errors import DuplicateTitleError, IngestionError


def normalize_token(text: str) -> str:
    """Case-fold ``text``. Idempotent; empty input is permitted."""
    return text.casefold()


def fold_accents(text: str) -> str:
    """Strip accents by canonical decomposition and removal of combining marks.

    "schröder" becomes "schroder". Returns the input unchanged when it
    carries no combining marks after decomposition.
    """
    decomposed = unicodedata.normalize("NFD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def token_starts(text: str) -> list[int]:
    """Offsets where tokens begin: an alphanumeric char preceded by a non-alphanumeric one."""
    starts = []
    prev_alnum = False
    for i, ch in enumerate(text):
        alnum = ch.isalnum()
        if alnum and not prev_alnum:
            starts.append(i)
        prev_alnum = alnum
    return starts


class VariantKind(enum.Enum):
    FULL_TITLE = "full_title"
    TOKEN_SUFFIX = "token_suffix"
    ACCENT_FOLDED = "accent_folded"


@dataclass(frozen=True)
class IndexedVariant:
    """One normalized surface string under which an entity is findable."""

    surface: str
    kind: VariantKind
    entity_id: str


@dataclass(frozen=True)
class EntityRecord:
    """A Wikipedia entity: canonical title, redirects, popularity, category.

    ``cumulative_views`` is the page-view total over the aggregation window,
    summed across the canonical page and all redirects.
    """

    entity_id: str
    canonical_title: str
    language: str
    redirect_titles: tuple[str, ...] = ()
    cumulative_views: int = 0
    category: str | None = None

    def __post_init__(self):
        if not self.canonical_title:
            raise ValueError("canonical_title must be non-empty")
        if self.cumulative_views < 0:
            raise ValueError(f"cumulative_views must be >= 0, got {self.cumulative_views}")
        if self.canonical_title in self.redirect_titles:
            raise ValueError(
                f"redirect equals canonical title: {self.canonical_title!r}"
            )


@dataclass(frozen=True)
class Suggestion:
    """One autocompletion hit.

    ``matched_surface`` is the lexicographically smallest indexed variant of
    the entity that starts with the queried prefix, which keeps responses
    deterministic when several variants match.
    """

    entity_id: str
    display_title: str
    cumulative_views: int
    matched_surface: str


def index_variants(record: EntityRecord) -> list[IndexedVariant]:
    """All surfaces under which ``record`` is inserted into the trie.

    For the canonical title and each redirect: the full normalized string,
    the suffix starting at every token boundary after the first, and
    accent-folded duplicates of both whenever folding changes the string.
    Duplicate (surface, entity) pairs are dropped, keeping the first kind
    that produced them.
    """
    variants: list[IndexedVariant] = []
    seen: set[str] = set()

    def emit(surface: str, kind: VariantKind):
        if surface and surface not in seen:
            seen.add(surface)
            variants.append(IndexedVariant(surface, kind, record.entity_id))

    for title in (record.canonical_title, *record.redirect_titles):
        full = normalize_token(title)
        emit(full, VariantKind.FULL_TITLE)
        suffixes = [full[i:] for i in token_starts(full)[1:]]
        for suffix in suffixes:
            emit(suffix, VariantKind.TOKEN_SUFFIX)
        for source in (full, *suffixes):
            folded = fold_accents(source)
            if folded != source:
                emit(folded, VariantKind.ACCENT_FOLDED)
    return variants


class _TrieNode:
    __slots__ = ("children", "entries")

    def __init__(self):
        self.children: dict[str, _TrieNode] = {}
        # entity_id -> smallest surface passing through this node; replaced
        # by a popularity-ordered tuple of Suggestions when the index freezes.
        self.entries: dict[str, str] | tuple[Suggestion, ...] = {}


class EntityIndex:
    """Immutable prefix tree over entity variants for one language.

    Safe for unlimited concurrent readers; rebuilds produce a fresh instance
    that callers swap in atomically.
    """

    def __init__(self, root: _TrieNode, language: str, entity_count: int, variant_count: int):
        self._root = root
        self.language = language
        self.entity_count = entity_count
        self.variant_count = variant_count

    def suggest(self, prefix: str, limit: int = 10) -> list[Suggestion]:
        """Up to ``limit`` entities with a variant extending ``prefix``.

        Ordered by cumulative views descending, then display title ascending.
        The empty prefix matches nothing. Unknown prefixes yield an empty list.
        """
        if limit < 1:
            raise ValueError(f"limit must be >= 1, got {limit}")
        needle = normalize_token(prefix)
        if not needle:
            return []
        node = self._root
        for ch in needle:
            child = node.children.get(ch)
            if child is None:
                return []
            node = child
        return list(node.entries[:limit])


def build_index(records: list[EntityRecord]) -> EntityIndex:
    """Build the autocompletion index for one language's records.

    Rejects an empty record list, mixed languages, and duplicate canonical
    titles (the latter with :class:`DuplicateTitleError`).
    """
    if not records:
        raise ValueError("cannot build an index from an empty record list")
    language = records[0].language
    titles_seen: set[str] = set()
    for record in records:
        if record.language != language:
            raise ValueError(
                f"mixed languages in one index: {language!r} and {record.language!r}"
            )
        if record.canonical_title in titles_seen:
            raise DuplicateTitleError(
                f"duplicate canonical title {record.canonical_title!r} for language {language!r}"
            )
        titles_seen.add(record.canonical_title)

    root = _TrieNode()
    by_id = {r.entity_id: r for r in records}
    variant_count = 0
    for record in records:
        for variant in index_variants(record):
            variant_count += 1
            node = root
            for ch in variant.surface:
                node = node.children.setdefault(ch, _TrieNode())
                entries = node.entries
                current = entries.get(variant.entity_id)
                if current is None or variant.surface < current:
                    entries[variant.entity_id] = variant.surface

    # freeze iteratively to stay clear of recursion limits on long titles
    stack = [root]
    while stack:
        node = stack.pop()
        suggestions = [
            Suggestion(
                entity_id=eid,
                display_title=by_id[eid].canonical_title,
                cumulative_views=by_id[eid].cumulative_views,
                matched_surface=surface,
            )
            for eid, surface in node.entries.items()
        ]
        suggestions.sort(key=lambda s: (-s.cumulative_views, s.display_title))
        node.entries = tuple(suggestions)
        stack.extend(node.children.values())

    return EntityIndex(root, language, len(records), variant_count)


# --- page views ---------------------------------------------------------


@dataclass(frozen=True)
class DateWindow:
    """Closed date range; both endpoints inclusive."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"empty window: {self.start} > {self.end}")

    def __contains__(self, day: date) -> bool:
        return self.start <= day <= self.end


@dataclass
class PageViewLedger:
    """Daily view counts keyed by (title, date), plus the redirect map.

    Counts may be keyed by canonical titles or by redirect titles; the
    aggregation resolves redirects in one hop.
    """

    counts: dict[tuple[str, date], int]
    redirect_map: dict[str, str]
    window: DateWindow

    def __post_init__(self):
        for (title, day), count in self.counts.items():
            if count < 0:
                raise ValueError(f"negative count for ({title!r}, {day})")


@dataclass(frozen=True)
class AggregatedViews:
    """Outcome of a page-view aggregation run.

    ``orphans`` holds in-window counts whose resolved title matches no
    record, keyed by that resolved title; they are reported, never dropped.
    """

    views: dict[str, int]
    orphans: dict[str, int]

    @property
    def orphan_total(self) -> int:
        return sum(self.orphans.values())


def redirect_map_from_records(records: list[EntityRecord]) -> dict[str, str]:
    """redirect title -> canonical title, for every redirect of every record."""
    mapping: dict[str, str] = {}
    for record in records:
        for redirect in record.redirect_titles:
            mapping[redirect] = record.canonical_title
    return mapping


def aggregate_page_views(
    ledger: PageViewLedger, records: list[EntityRecord]
) -> AggregatedViews:
    """Sum each entity's in-window daily counts plus those of its redirects.

    Requires an acyclic, single-hop redirect map. Conserves mass: total
    in-window input equals the sum of per-entity views plus the orphan
    bucket.
    """
    for source, target in ledger.redirect_map.items():
        if source == target:
            raise ValueError(f"redirect cycle at {source!r}")
        if target in ledger.redirect_map:
            raise ValueError(
                f"redirect chain: {source!r} -> {target!r} -> {ledger.redirect_map[target]!r}"
            )

    entity_by_title = {r.canonical_title: r.entity_id for r in records}
    views = {r.entity_id: 0 for r in records}
    orphans: dict[str, int] = {}
    for (title, day), count in ledger.counts.items():
        if day not in ledger.window:
            continue
        canonical = ledger.redirect_map.get(title, title)
        entity_id = entity_by_title.get(canonical)
        if entity_id is None:
            orphans[canonical] = orphans.get(canonical, 0) + count
        else:
            views[entity_id] += count
    return AggregatedViews(views=views, orphans=orphans)


def with_views(records: list[EntityRecord], aggregated: AggregatedViews) -> list[EntityRecord]:
    """Copies of ``records`` with ``cumulative_views`` filled in from an aggregation."""
    return [replace(r, cumulative_views=aggregated.views.get(r.entity_id, 0)) for r in records]


# --- file ingestion -----------------------------------------------------


def load_entities(path: str | Path) -> list[EntityRecord]:
    """Parse the entity TSV: id, language, title, pipe-separated redirects, category.

    Redirects and category may be empty. Raises :class:`IngestionError`
    naming the line on malformed input and :class:`DuplicateTitleError` on a
    repeated (language, canonical title) pair.
    """
    path = Path(path)
    records: list[EntityRecord] = []
    seen: set[tuple[str, str]] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                raise IngestionError(
                    f"expected 5 tab-separated fields, got {len(fields)}",
                    path=str(path),
                    line=lineno,
                )
            entity_id, language, title, redirects_field, category = fields
            if not entity_id or not language or not title:
                raise IngestionError(
                    "entity_id, language and canonical_title must be non-empty",
                    path=str(path),
                    line=lineno,
                )
            key = (language, title)
            if key in seen:
                raise DuplicateTitleError(
                    f"duplicate canonical title {title!r} for language {language!r}",
                    path=str(path),
                    line=lineno,
                )
            seen.add(key)
            redirects = tuple(t for t in redirects_field.split("|") if t)
            try:
                records.append(
                    EntityRecord(
                        entity_id=entity_id,
                        canonical_title=title,
                        language=language,
                        redirect_titles=redirects,
                        category=category or None,
                    )
                )
            except ValueError as exc:
                raise IngestionError(str(exc), path=str(path), line=lineno) from exc
    return records


def load_page_view_rows(path: str | Path) -> list[tuple[str, date, int]]:
    """Parse the page-view TSV: title, ISO date, count."""
    path = Path(path)
    rows: list[tuple[str, date, int]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise IngestionError(
                    f"expected 3 tab-separated fields, got {len(fields)}",
                    path=str(path),
                    line=lineno,
                )
            title, day_text, count_text = fields
            try:
                day = date.fromisoformat(day_text)
                count = int(count_text)
            except ValueError as exc:
                raise IngestionError(str(exc), path=str(path), line=lineno) from exc
            if count < 0:
                raise IngestionError(
                    f"negative view count {count}", path=str(path), line=lineno
                )
            rows.append((title, day, count))
    return rows


def build_ledger(
    rows: list[tuple[str, date, int]],
    redirect_map: dict[str, str],
    window: DateWindow,
) -> PageViewLedger:
    """Fold raw (title, date, count) rows into a ledger; repeats are summed."""
    counts: dict[tuple[str, date], int] = {}
    for title, day, count in rows:
        key = (title, day)
        counts[key] = counts.get(key, 0) + count
    return PageViewLedger(counts=counts, redirect_map=redirect_map, window=window)
