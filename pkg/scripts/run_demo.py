#!/usr/bin/env python3
"""Run the full gateway offline against the bundled fixture corpus.

Builds a demo data directory from tests/data via the ingest commands,
starts a local mock archive speaking the CDX wire format, and serves the
API (plus the UI when frontend/dist exists) on http://127.0.0.1:8080.

Usage: python3 scripts/run_demo.py [--port 8080]
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from click.testing import CliRunner

from archivesearch.cli import main as cli_main
from archivesearch.config import ServiceConfig
from archivesearch.search_gateway import load_result_file
from archivesearch.service import serve
from archivesearch.testing import MockCdxServer

DATA = ROOT / "tests" / "data"
DEMO = ROOT / "demo_data"


def build_demo_dir() -> Path:
    runner = CliRunner()
    raw = DATA / "raw"
    steps = [
        ["ingest-entities", "--file", str(raw / "entities.tsv"), "--data-dir", str(DEMO)],
        ["ingest-views", "--file", str(raw / "views.en.tsv"), "--data-dir", str(DEMO),
         "--lang", "en"],
        ["ingest-links", "--file", str(raw / "links.en.tsv"), "--data-dir", str(DEMO),
         "--lang", "en"],
        ["ingest-links", "--file", str(raw / "links.de.tsv"), "--data-dir", str(DEMO),
         "--lang", "de"],
        ["ingest-interlang", "--file", str(raw / "interlang.tsv"), "--data-dir", str(DEMO)],
    ]
    for step in steps:
        result = runner.invoke(cli_main, step)
        if result.exit_code != 0:
            raise SystemExit(f"demo setup failed: {result.output}")
        print(result.output.strip())
    results_dir = DEMO / "results"
    results_dir.mkdir(exist_ok=True)
    for source in (DATA / "results").glob("*.tsv"):
        (results_dir / source.name).write_text(
            source.read_text(encoding="utf-8"), encoding="utf-8"
        )
    return DEMO


def synthetic_captures() -> dict[str, list[str]]:
    """Deterministic pseudo-archive: most fixture URLs get 1-3 captures."""
    captures: dict[str, list[str]] = {}
    for result_file in sorted((DEMO / "results").glob("*.tsv")):
        for result in load_result_file(result_file):
            digest = hashlib.sha256(result.url.encode()).digest()
            n = digest[0] % 4  # 0..3 captures; some URLs stay unarchived
            stamps = []
            for i in range(n):
                year = 2001 + digest[1 + i] % 15
                month = 1 + digest[4 + i] % 12
                day = 1 + digest[7 + i] % 28
                stamps.append(f"{year:04d}{month:02d}{day:02d}120000")
            captures[result.url] = sorted(stamps)
    return captures


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args()

    data_dir = build_demo_dir()
    archive = MockCdxServer(synthetic_captures()).start()
    print(f"mock archive answering on {archive.endpoint}")

    static_dir = ROOT / "frontend" / "dist"
    if not static_dir.exists():
        print("note: frontend/dist missing; run `npm run build` in frontend/ for the UI")
        static_dir = None

    config = ServiceConfig(
        port=args.port,
        data_dir=data_dir,
        cache_path=DEMO / "cache.db",
        archive_endpoint=archive.endpoint,
        archive_replay_template=archive.endpoint.rsplit("/", 1)[0]
        + "/replay/{timestamp}/{url}",
        static_dir=static_dir,
    )
    print(f"serving on http://127.0.0.1:{args.port} (Ctrl-C to stop)")
    try:
        serve(config)
    finally:
        archive.stop()


if __name__ == "__main__":
    main()
