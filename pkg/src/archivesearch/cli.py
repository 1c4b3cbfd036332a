"""Command-line interface: ingestion, refresh, analytics and serving."""

from __future__ import annotations

import sys
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import click

from . import analytics, entity_graph, entity_index, result_cache, search_gateway, service
from .config import load_config
from .errors import ArchiveSearchError

DEFAULT_VIEW_WINDOW = (date(2011, 1, 1), date(2014, 12, 31))


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Entity-oriented web archive search gateway."""


@main.command("ingest-entities")
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
def ingest_entities(file_path: str, data_dir: str):
    """Validate an entity TSV and install it per language into the data dir."""
    try:
        records = entity_index.load_entities(file_path)
    except ArchiveSearchError as exc:
        _fail(str(exc))
    by_language: dict[str, list[entity_index.EntityRecord]] = {}
    for record in records:
        by_language.setdefault(record.language, []).append(record)
    out_dir = Path(data_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for language, group in sorted(by_language.items()):
        lines = [
            "\t".join(
                (
                    r.entity_id,
                    r.language,
                    r.canonical_title,
                    "|".join(r.redirect_titles),
                    r.category or "",
                )
            )
            for r in group
        ]
        target = out_dir / f"entities.{language}.tsv"
        target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        click.echo(f"{len(group)} entities ingested for {language} -> {target}")


@main.command("ingest-views")
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--lang", required=True)
@click.option("--window-start", type=click.DateTime(["%Y-%m-%d"]), default=None)
@click.option("--window-end", type=click.DateTime(["%Y-%m-%d"]), default=None)
def ingest_views(file_path, data_dir, lang, window_start, window_end):
    """Aggregate daily page views (redirects included) into per-entity totals."""
    start = window_start.date() if window_start else DEFAULT_VIEW_WINDOW[0]
    end = window_end.date() if window_end else DEFAULT_VIEW_WINDOW[1]
    data = Path(data_dir)
    try:
        records = entity_index.load_entities(data / f"entities.{lang}.tsv")
        rows = entity_index.load_page_view_rows(file_path)
        ledger = entity_index.build_ledger(
            rows,
            entity_index.redirect_map_from_records(records),
            entity_index.DateWindow(start, end),
        )
        aggregated = entity_index.aggregate_page_views(ledger, records)
    except (ArchiveSearchError, ValueError) as exc:
        _fail(str(exc))
    target = data / f"views.{lang}.tsv"
    lines = [f"{eid}\t{views}" for eid, views in sorted(aggregated.views.items())]
    target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    click.echo(f"{len(aggregated.views)} entities aggregated -> {target}")
    if aggregated.orphans:
        click.echo(
            f"warning: {aggregated.orphan_total} views over "
            f"{len(aggregated.orphans)} titles matched no entity",
            err=True,
        )


@main.command("ingest-links")
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
@click.option("--lang", required=True)
def ingest_links(file_path, data_dir, lang):
    """Validate an edge-list file and install it into the data dir."""
    try:
        graph = entity_graph.load_graph_file(file_path, language=lang)
    except ArchiveSearchError as exc:
        _fail(str(exc))
    out_dir = Path(data_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / f"links.{lang}.tsv"
    lines = [f"W\t{graph.total_articles}"]
    for source in sorted(graph.outlinks):
        for dest in sorted(graph.outlinks[source]):
            lines.append(f"{source}\t{dest}")
    target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    click.echo(
        f"{sum(len(v) for v in graph.outlinks.values())} edges, "
        f"{len(graph.inlinks)} linked entities -> {target}"
    )


@main.command("ingest-interlang")
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
def ingest_interlang(file_path, data_dir):
    """Validate an inter-language TSV and install it into the data dir."""
    try:
        mapping = entity_graph.load_interlanguage(file_path)
    except ArchiveSearchError as exc:
        _fail(str(exc))
    out_dir = Path(data_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / "interlang.tsv"
    target.write_text(Path(file_path).read_text(encoding="utf-8"), encoding="utf-8")
    click.echo(f"{len(mapping)} language pairs -> {target}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed-file", type=click.Path(exists=True), default=None)
@click.option("--seed-lang", default="en")
@click.option("--now", "now_text", default=None, help="Override the clock (ISO-8601), for testing.")
def refresh(config_path, seed_file, seed_lang, now_text):
    """Re-fetch every seed or user query whose snapshot is stale."""
    try:
        config = load_config(config_path)
        state = service.build_state(config)
    except ArchiveSearchError as exc:
        _fail(str(exc))
    seed_path = seed_file or (str(config.seed_list_path) if config.seed_list_path else None)
    titles: tuple[str, ...] = ()
    if seed_path:
        titles = tuple(
            line.strip()
            for line in Path(seed_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        )
    policy = result_cache.RefreshPolicy(
        interval=timedelta(days=config.refresh_interval_days),
        seed_list=titles,
        seed_language=seed_lang,
    )
    now = (
        datetime.fromisoformat(now_text.replace("Z", "+00:00")).astimezone(timezone.utc)
        if now_text
        else search_gateway.utc_now()
    )
    due = state.cache.refresh_due(policy, now)
    refreshed = 0
    failed = 0
    for title, language in due:
        try:
            results = state.provider.fetch(title, language)
            state.cache.put_snapshot(
                result_cache.CachedResultSet(
                    query_key=(title, language),
                    retrieved_at=now,
                    results=tuple(results),
                    provider_id=state.provider.provider_id,
                )
            )
            refreshed += 1
        except ArchiveSearchError as exc:
            failed += 1
            click.echo(f"warning: refresh failed for {(title, language)}: {exc}", err=True)
    click.echo(f"{refreshed} refreshed")
    if failed and not refreshed:
        _fail(f"all {failed} refreshes failed")


@main.group()
def analyze():
    """Offline analytics over exported snapshots."""


@analyze.command()
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--archived", "archived_path", required=True, type=click.Path(exists=True))
@click.option("--cutoffs", default="10,20,30,40,50", show_default=True)
@click.option("--ranked-entities", required=True, type=click.Path(exists=True))
@click.option("--positions", default="1", show_default=True)
@click.option("--bucket-size", default=analytics.DEFAULT_BUCKET_SIZE, show_default=True)
@click.option("--period", default=None, help="retrieved_at prefix selecting the snapshots")
@click.option("--out-dir", default=".", type=click.Path(file_okay=False))
def coverage(manifest, archived_path, cutoffs, ranked_entities, positions, bucket_size, period, out_dir):
    """Archive coverage by popularity bucket and top-k cutoff."""
    try:
        entries = analytics.load_manifest(manifest)
        flags = analytics.load_archived_flags(archived_path)
        ranked = analytics.load_ranked_entities(ranked_entities)
        buckets = analytics.bucket_entities(
            ranked, [int(p) for p in positions.split(",")], bucket_size
        )
        results = analytics.snapshot_urls(entries, period)
        report = analytics.coverage(
            buckets,
            results,
            analytics.archived_predicate(flags),
            tuple(int(c) for c in cutoffs.split(",")),
        )
    except (ArchiveSearchError, ValueError) as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "coverage.tsv").write_text(analytics.coverage_display_tsv(report), encoding="utf-8")
    (out / "coverage_machine.tsv").write_text(
        analytics.coverage_machine_tsv(report), encoding="utf-8"
    )
    click.echo(f"coverage report for {len(report.rows)} buckets -> {out / 'coverage.tsv'}")


@analyze.command()
@click.option("--manifest", required=True, type=click.Path(exists=True))
@click.option("--periods", required=True, help="two retrieved_at prefixes, comma-separated")
@click.option("--k", "ks", default="50,100", show_default=True)
@click.option("--entities", "entities_path", default=None, type=click.Path(exists=True),
              help="entity TSV supplying categories; omitted = one 'all' category")
@click.option("--out-dir", default=".", type=click.Path(file_okay=False))
def overlap(manifest, periods, ks, entities_path, out_dir):
    """Mean result overlap between two retrieval periods, by category."""
    period_list = [p for p in periods.split(",") if p]
    if len(period_list) != 2:
        _fail(f"--periods needs exactly two comma-separated values, got {periods!r}")
    try:
        entries = analytics.load_manifest(manifest)
        categories: dict[str, str] = {}
        if entities_path:
            for record in entity_index.load_entities(entities_path):
                key = entity_index.normalize_token(record.canonical_title)
                categories[key] = record.category or "uncategorized"
        by_period = {p: analytics.snapshot_urls(entries, p) for p in period_list}
        grouped: dict[str, dict[str, dict[str, list[str]]]] = {}
        for period_label, per_entity in by_period.items():
            for entity, urls in per_entity.items():
                category = categories.get(entity, "all")
                grouped.setdefault(category, {}).setdefault(entity, {})[period_label] = urls
        report = analytics.category_overlap(
            grouped, (period_list[0], period_list[1]), [int(k) for k in ks.split(",")]
        )
    except (ArchiveSearchError, ValueError) as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "overlap.tsv").write_text(analytics.overlap_tsv(report), encoding="utf-8")
    for warning in report.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(f"overlap report with {len(report.rows)} rows -> {out / 'overlap.tsv'}")


@analyze.command()
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", default=".", type=click.Path(file_okay=False))
def annotations(file_path, out_dir):
    """Long-term/short-term relevance distribution from assessor labels."""
    try:
        records = analytics.load_annotations(file_path)
        distributions = analytics.aggregate_annotations(records)
    except ArchiveSearchError as exc:
        _fail(str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "annotations.tsv").write_text(
        analytics.annotations_tsv(distributions), encoding="utf-8"
    )
    click.echo(f"{len(distributions)} queries aggregated -> {out / 'annotations.tsv'}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--lang", "languages", default=None, help="comma-separated language codes")
@click.option("--provider", type=click.Choice(["fixture", "live"]), default=None)
@click.option("--archive-endpoint", default=None)
@click.option("--data-dir", type=click.Path(), default=None)
@click.option("--cache", "cache_path", type=click.Path(), default=None)
@click.option("--static-dir", type=click.Path(), default=None)
def serve(config_path, host, port, languages, provider, archive_endpoint, data_dir, cache_path, static_dir):
    """Run the HTTP API (and the UI when a static dir is configured)."""
    try:
        config = load_config(
            config_path,
            host=host,
            port=port,
            languages=languages,
            provider=provider,
            archive_endpoint=archive_endpoint,
            data_dir=data_dir,
            cache_path=cache_path,
            static_dir=static_dir,
        )
        service.serve(config)
    except ArchiveSearchError as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
