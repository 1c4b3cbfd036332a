"""Coverage, temporal-overlap and annotation analytics over cached results.

All computations are pure functions of their input files: identical inputs
produce byte-identical reports. Coverage percentages are carried as exact
fractions internally; the display report rounds half-up to whole percents
(noted in the machine report's metadata) while the machine report keeps
full precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .entity_index import normalize_token
from .errors import IngestionError
from .search_gateway import load_result_file, normalize_url

DEFAULT_CUTOFFS = (10, 20, 30, 40, 50)
DEFAULT_BUCKET_SIZE = 1000


# --- popularity buckets -------------------------------------------------


@dataclass(frozen=True)
class PopularityBucket:
    """A block of consecutively ranked entities in the view-count ordering."""

    label: str
    start_rank: int
    end_rank: int
    entity_ids: tuple[str, ...]

    def __post_init__(self):
        if self.end_rank - self.start_rank + 1 != len(self.entity_ids):
            raise ValueError("bucket size must equal its rank span")


def bucket_entities(
    entities_by_views: Sequence[str],
    positions: Iterable[int],
    bucket_size: int = DEFAULT_BUCKET_SIZE,
) -> list[PopularityBucket]:
    """Slice non-overlapping buckets out of a view-ranked entity list.

    ``entities_by_views`` must already be sorted by cumulative views
    descending; ``positions`` are the 1-based start ranks. A position whose
    bucket would run past the corpus is rejected by name.
    """
    positions = sorted(positions)
    buckets = []
    previous_end = 0
    for position in positions:
        end = position + bucket_size - 1
        if position < 1 or end > len(entities_by_views):
            raise ValueError(
                f"position {position} out of range for a corpus of {len(entities_by_views)}"
                f" entities and bucket size {bucket_size}"
            )
        if position <= previous_end:
            raise ValueError(f"position {position} overlaps the previous bucket")
        previous_end = end
        buckets.append(
            PopularityBucket(
                label=f"{position} - {end}",
                start_rank=position,
                end_rank=end,
                entity_ids=tuple(entities_by_views[position - 1 : end]),
            )
        )
    return buckets


# --- archive coverage ---------------------------------------------------


@dataclass(frozen=True)
class CoverageRow:
    """Coverage of one bucket: mean archived fraction at each cutoff.

    ``percentages`` maps cutoff k to the exact mean (0..100) over entities
    of (archived among first k results) / k, each entity capped at its
    actual result count; None when every entity was excluded. ``excluded``
    counts zero-result entities left out of that cutoff's mean.
    """

    bucket_label: str
    percentages: dict[int, Fraction | None]
    excluded: dict[int, int]


@dataclass(frozen=True)
class CoverageReport:
    cutoffs: tuple[int, ...]
    rows: tuple[CoverageRow, ...]


def coverage(
    buckets: Sequence[PopularityBucket],
    results_by_entity: Mapping[str, Sequence[str]],
    archived: Callable[[str], bool],
    cutoffs: Sequence[int] = DEFAULT_CUTOFFS,
) -> CoverageReport:
    """Archive coverage of top-k results, averaged per bucket.

    The per-entity archived fraction is computed first and then averaged
    over the bucket, so entities with short result lists contribute the
    fraction over their actual length instead of skewing a pooled count.
    """
    rows = []
    for bucket in buckets:
        percentages: dict[int, Fraction | None] = {}
        excluded: dict[int, int] = {}
        for k in cutoffs:
            fractions = []
            skipped = 0
            for entity in bucket.entity_ids:
                urls = results_by_entity.get(entity, ())
                effective = min(k, len(urls))
                if effective == 0:
                    skipped += 1
                    continue
                hits = sum(1 for url in urls[:effective] if archived(url))
                fractions.append(Fraction(hits, effective))
            percentages[k] = (
                100 * sum(fractions) / len(fractions) if fractions else None
            )
            excluded[k] = skipped
        rows.append(CoverageRow(bucket.label, percentages, excluded))
    return CoverageReport(cutoffs=tuple(cutoffs), rows=tuple(rows))


def percent_display(value: Fraction | None) -> str:
    """Whole-percent display with half-up rounding; '-' for an empty mean."""
    if value is None:
        return "-"
    return f"{math.floor(value + Fraction(1, 2))}%"


def coverage_display_tsv(report: CoverageReport) -> str:
    header = "Entity rank\t" + "\t".join(f"Top {k}" for k in report.cutoffs)
    lines = [header]
    for row in report.rows:
        cells = [percent_display(row.percentages[k]) for k in report.cutoffs]
        lines.append(row.bucket_label + "\t" + "\t".join(cells))
    return "".join(line + "\n" for line in lines)


def coverage_machine_tsv(report: CoverageReport) -> str:
    lines = [
        "# display file rounds half-up to whole percents; values here are unrounded",
        "bucket\tcutoff\tpercentage\texcluded_entities",
    ]
    for row in report.rows:
        for k in report.cutoffs:
            value = row.percentages[k]
            cell = repr(float(value)) if value is not None else ""
            lines.append(f"{row.bucket_label}\t{k}\t{cell}\t{row.excluded[k]}")
    return "".join(line + "\n" for line in lines)


# --- temporal result overlap --------------------------------------------


def overlap(urls_a: Sequence[str], urls_b: Sequence[str], k: int) -> float:
    """Percentage of shared URLs between two top-k result lists.

    Both lists are truncated to their first k entries and compared as sets
    of normalized URLs: 100 * |A ∩ B| / min(|A|, |B|). An empty side makes
    the overlap 0.
    """
    set_a = {normalize_url(u) for u in urls_a[:k]}
    set_b = {normalize_url(u) for u in urls_b[:k]}
    if not set_a or not set_b:
        return 0.0
    return 100.0 * len(set_a & set_b) / min(len(set_a), len(set_b))


@dataclass(frozen=True)
class OverlapRow:
    category: str
    periods: tuple[str, str]
    k: int
    mean_overlap: float
    entity_count: int


@dataclass(frozen=True)
class OverlapReport:
    rows: tuple[OverlapRow, ...]
    warnings: tuple[str, ...] = ()


def category_overlap(
    results_by_category: Mapping[str, Mapping[str, Mapping[str, Sequence[str]]]],
    period_pair: tuple[str, str],
    ks: Sequence[int] = (50, 100),
) -> OverlapReport:
    """Mean per-entity overlap between two periods, grouped by category.

    ``results_by_category`` maps category -> entity -> period -> ranked
    URLs. Entities lacking either period are skipped; a category with no
    usable entity is omitted from the rows and reported as a warning.
    """
    first, second = period_pair
    rows = []
    warnings = []
    for category in sorted(results_by_category):
        entities = results_by_category[category]
        per_k: dict[int, list[float]] = {k: [] for k in ks}
        for entity in sorted(entities):
            periods = entities[entity]
            if first not in periods or second not in periods:
                continue
            for k in ks:
                per_k[k].append(overlap(periods[first], periods[second], k))
        if not per_k[ks[0]]:
            warnings.append(
                f"category {category!r} has no entity with snapshots in both"
                f" {first} and {second}; omitted"
            )
            continue
        for k in ks:
            values = per_k[k]
            rows.append(
                OverlapRow(
                    category=category,
                    periods=(first, second),
                    k=k,
                    mean_overlap=sum(values) / len(values),
                    entity_count=len(values),
                )
            )
    return OverlapReport(rows=tuple(rows), warnings=tuple(warnings))


def overlap_tsv(report: OverlapReport) -> str:
    lines = ["category\tperiod_a\tperiod_b\tk\tmean_overlap_pct\tentities"]
    for row in report.rows:
        lines.append(
            f"{row.category}\t{row.periods[0]}\t{row.periods[1]}\t{row.k}"
            f"\t{row.mean_overlap:.4f}\t{row.entity_count}"
        )
    lines.extend(f"# warning: {w}" for w in report.warnings)
    return "".join(line + "\n" for line in lines)


# --- relevance annotations ----------------------------------------------


class RelevanceLabel(enum.Enum):
    LONG_TERM = "long"
    SHORT_TERM = "short"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class AnnotationRecord:
    """Assessor labels for one (query, url) pair; at least 4 are required."""

    query: str
    url: str
    assessor_labels: tuple[RelevanceLabel, ...]

    def __post_init__(self):
        if len(self.assessor_labels) < 4:
            raise ValueError(
                f"need at least 4 labels per (query, url), got {len(self.assessor_labels)}"
            )


@dataclass(frozen=True)
class RelevanceDistribution:
    """Share of long-term vs short-term relevant pages for one query."""

    long_pct: float
    short_pct: float
    labeled_urls: int
    unknown_urls: int


def majority_label(labels: Iterable[RelevanceLabel]) -> RelevanceLabel:
    """Strict majority of the non-UNKNOWN votes; ties and no votes are UNKNOWN."""
    long_votes = sum(1 for l in labels if l is RelevanceLabel.LONG_TERM)
    short_votes = sum(1 for l in labels if l is RelevanceLabel.SHORT_TERM)
    if long_votes > short_votes:
        return RelevanceLabel.LONG_TERM
    if short_votes > long_votes:
        return RelevanceLabel.SHORT_TERM
    return RelevanceLabel.UNKNOWN


def aggregate_annotations(
    records: Sequence[AnnotationRecord],
) -> dict[str, RelevanceDistribution]:
    """Per-query long/short percentages from majority-voted URL labels.

    URLs whose final label is UNKNOWN are counted but excluded from the
    percentages; a query with no decided URL is omitted entirely.
    """
    votes: dict[str, dict[str, list[RelevanceLabel]]] = {}
    for record in records:
        votes.setdefault(record.query, {}).setdefault(record.url, []).extend(
            record.assessor_labels
        )
    distributions: dict[str, RelevanceDistribution] = {}
    for query in sorted(votes):
        finals = [majority_label(labels) for labels in votes[query].values()]
        long_urls = sum(1 for f in finals if f is RelevanceLabel.LONG_TERM)
        short_urls = sum(1 for f in finals if f is RelevanceLabel.SHORT_TERM)
        unknown_urls = sum(1 for f in finals if f is RelevanceLabel.UNKNOWN)
        labeled = long_urls + short_urls
        if labeled == 0:
            continue
        distributions[query] = RelevanceDistribution(
            long_pct=100.0 * long_urls / labeled,
            short_pct=100.0 * short_urls / labeled,
            labeled_urls=labeled,
            unknown_urls=unknown_urls,
        )
    return distributions


def annotations_tsv(distributions: Mapping[str, RelevanceDistribution]) -> str:
    lines = ["query\tlong_term_pct\tshort_term_pct\tlabeled_urls\tunknown_urls"]
    for query in sorted(distributions):
        dist = distributions[query]
        lines.append(
            f"{query}\t{dist.long_pct:.2f}%\t{dist.short_pct:.2f}%"
            f"\t{dist.labeled_urls}\t{dist.unknown_urls}"
        )
    return "".join(line + "\n" for line in lines)


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    """Parse the annotation TSV: query, url, comma-separated labels.

    Label tokens are ``long``, ``short`` and ``unknown`` (case-insensitive).
    Records with fewer than 4 labels are rejected at ingestion.
    """
    path = Path(path)
    records = []
    tokens = {label.value: label for label in RelevanceLabel}
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
            query, url, labels_field = fields
            labels = []
            for token in labels_field.split(","):
                token = token.strip().lower()
                if token not in tokens:
                    raise IngestionError(
                        f"unknown label {token!r}", path=str(path), line=lineno
                    )
                labels.append(tokens[token])
            if len(labels) < 4:
                raise IngestionError(
                    f"need at least 4 labels, got {len(labels)}",
                    path=str(path),
                    line=lineno,
                )
            records.append(AnnotationRecord(query, url, tuple(labels)))
    return records


# --- manifest plumbing ---------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    query: str
    language: str
    retrieved_at: str
    path: Path


def load_manifest(manifest_path: str | Path) -> list[ManifestEntry]:
    """Parse a cache-export manifest; file names resolve next to it."""
    manifest_path = Path(manifest_path)
    entries = []
    with manifest_path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise IngestionError(
                    f"expected 4 tab-separated fields, got {len(fields)}",
                    path=str(manifest_path),
                    line=lineno,
                )
            query, language, retrieved_at, name = fields
            entries.append(
                ManifestEntry(query, language, retrieved_at, manifest_path.parent / name)
            )
    return entries


def snapshot_urls(entries: Sequence[ManifestEntry], period: str | None = None) -> dict[str, list[str]]:
    """Ranked result URLs per query, from the newest matching snapshot.

    ``period`` filters by retrieved_at prefix (e.g. "2015-08"); None takes
    the newest snapshot overall.
    """
    chosen: dict[str, ManifestEntry] = {}
    for entry in entries:
        if period is not None and not entry.retrieved_at.startswith(period):
            continue
        key = normalize_token(entry.query)
        current = chosen.get(key)
        if current is None or entry.retrieved_at > current.retrieved_at:
            chosen[key] = entry
    return {
        key: [result.url for result in load_result_file(entry.path)]
        for key, entry in chosen.items()
    }


def load_archived_flags(path: str | Path) -> dict[str, bool]:
    """Parse the archived-flag file: url, 0 or 1."""
    path = Path(path)
    flags: dict[str, bool] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2 or fields[1] not in ("0", "1"):
                raise IngestionError(
                    f"expected 'url<TAB>0|1', got {line!r}", path=str(path), line=lineno
                )
            flags[normalize_url(fields[0])] = fields[1] == "1"
    return flags


def archived_predicate(flags: Mapping[str, bool]) -> Callable[[str], bool]:
    """Lookup over normalized URLs; URLs absent from the file count as unarchived."""
    return lambda url: flags.get(normalize_url(url), False)


def load_ranked_entities(path: str | Path) -> list[str]:
    """Parse 'title <TAB> views' and return titles sorted by views descending.

    Ties sort by title ascending so bucket slicing is deterministic.
    """
    path = Path(path)
    rows: list[tuple[str, int]] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise IngestionError(
                    f"expected 'title<TAB>views', got {line!r}", path=str(path), line=lineno
                )
            try:
                rows.append((fields[0], int(fields[1])))
            except ValueError as exc:
                raise IngestionError(str(exc), path=str(path), line=lineno) from exc
    rows.sort(key=lambda item: (-item[1], item[0]))
    return [normalize_token(title) for title, _ in rows]
