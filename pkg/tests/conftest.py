import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from archivesearch.cli import main as cli_main
from archivesearch.testing import MockCdxServer

DATA = Path(__file__).parent / "data"

# capture tables for the recorded Angela Merkel result page: 9 of 10 URLs
# archived, rank 7 not, rank 10 a single-capture degenerate span
MERKEL_CAPTURES = {
    "https://de.wikipedia.org/wiki/Angela_Merkel": [
        "20010301000000", "20090704120000", "20151231235959",
    ],
    "https://www.bundeskanzlerin.de/": ["20060101000000", "20150801000000"],
    "https://www.bundesregierung.de/merkel": ["20080505000000", "20150401120000"],
    "https://www.spiegel.de/thema/angela_merkel/": ["20050301000000", "20150810000000"],
    "https://www.zeit.de/thema/angela-merkel": ["20070621000000", "20150501000000"],
    "https://www.faz.net/aktuell/politik/merkel": ["20090901000000", "20150715000000"],
    "https://www.welt.de/politik/merkel": ["20100101000000", "20150620000000"],
    "https://www.sueddeutsche.de/thema/Angela_Merkel": ["20110111000000", "20150303000000"],
    "https://www.handelsblatt.com/merkel": ["20140505120000"],
}


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory) -> Path:
    """A data directory built from the raw fixtures via the ingest commands."""
    target = tmp_path_factory.mktemp("svc") / "data"
    runner = CliRunner()
    raw = DATA / "raw"

    def run(*args):
        result = runner.invoke(cli_main, list(args))
        assert result.exit_code == 0, result.output
        return result

    run("ingest-entities", "--file", str(raw / "entities.tsv"), "--data-dir", str(target))
    run("ingest-views", "--file", str(raw / "views.en.tsv"), "--data-dir", str(target),
        "--lang", "en")
    run("ingest-links", "--file", str(raw / "links.en.tsv"), "--data-dir", str(target),
        "--lang", "en")
    run("ingest-links", "--file", str(raw / "links.de.tsv"), "--data-dir", str(target),
        "--lang", "de")
    run("ingest-interlang", "--file", str(raw / "interlang.tsv"), "--data-dir", str(target))
    shutil.copytree(DATA / "results", target / "results")
    return target


@pytest.fixture(scope="session")
def cdx_server():
    with MockCdxServer(MERKEL_CAPTURES) as server:
        yield server


@pytest.fixture
def counting_cdx(cdx_server):
    cdx_server.reset_counts()
    return cdx_server
