import json
import random
from datetime import datetime, timedelta, timezone

import pytest
import requests

from archivesearch.errors import (
    IngestionError,
    ProtocolError,
    ProviderError,
    TransportError,
    UrlNormalizationError,
)
from archivesearch.search_gateway import (
    ArchiveSpan,
    CdxArchiveClient,
    FixtureSearchProvider,
    LinkedResult,
    LiveSearchProvider,
    SearchQuery,
    SearchResult,
    SearchResultSet,
    archive_span,
    captures_around,
    entity_slug,
    format_ts14,
    link_results,
    load_result_file,
    normalize_url,
    parse_ts14,
    search,
    utc_now,
)
from archivesearch.testing import MockCdxServer

from conftest import DATA


def ranked_results(urls, start_rank=1):
    return tuple(
        SearchResult(rank=i, url=url, title=f"title {i}", snippet="s")
        for i, url in enumerate(urls, start=start_rank)
    )


@pytest.fixture
def cdx():
    captures = {
        "http://example.com/a": ["20010301000000", "20090704120000", "20151231235959"],
        "http://example.com/none": [],
        "http://example.com/single": ["20120630120000"],
        "http://example.com/year": [
            "20150115000000", "20150610000000", "20151224000000",
        ],
    }
    with MockCdxServer(captures) as server:
        yield server, CdxArchiveClient(server.endpoint, backoff=0.01)


class TestNormalizeUrl:
    def test_scheme_host_case_default_port_fragment(self):
        assert normalize_url("HTTP://Example.com:80/A#x") == "http://example.com/A"

    def test_already_canonical_unchanged(self):
        url = "https://example.com/a?b=1"
        assert normalize_url(url) == url

    def test_path_and_query_preserved_byte_exact(self):
        url = "https://example.com/A/B%20c?D=E&f=G"
        assert normalize_url(url) == url

    def test_non_default_port_kept(self):
        assert normalize_url("http://example.com:8080/x") == "http://example.com:8080/x"

    def test_https_default_port_removed(self):
        assert normalize_url("https://Example.com:443/") == "https://example.com/"

    def test_userinfo_preserved(self):
        assert normalize_url("http://User@Example.com/") == "http://User@example.com/"

    def test_relative_url_rejected(self):
        with pytest.raises(UrlNormalizationError):
            normalize_url("/just/a/path")

    def test_idempotent(self):
        urls = [
            "HTTP://Example.com:80/A#x",
            "https://example.com/a?b=1",
            "http://USER@HOST.example:8080/Path?q=Q#frag",
        ]
        for url in urls:
            once = normalize_url(url)
            assert normalize_url(once) == once


class TestQueryAndResultTypes:
    def test_page_bounds(self):
        with pytest.raises(ValueError):
            SearchQuery(entity_title="x", language="en", page=6)
        with pytest.raises(ValueError):
            SearchQuery(entity_title="x", language="en", page=0)

    def test_empty_title_rejected(self):
        with pytest.raises(ValueError):
            SearchQuery(entity_title="", language="en")

    def test_rank_contiguity_from_page_offset(self):
        results = ranked_results(["http://a.example/1", "http://a.example/2"], start_rank=11)
        SearchResultSet(
            entity_title="x", language="en", page=2, results=results,
            retrieved_at=utc_now(),
        )
        with pytest.raises(ValueError):
            SearchResultSet(
                entity_title="x", language="en", page=1, results=results,
                retrieved_at=utc_now(),
            )

    def test_invalid_result_url_rejected(self):
        with pytest.raises(UrlNormalizationError):
            SearchResult(rank=1, url="not-a-url", title="t", snippet="s")


class TestFixtureProvider:
    def test_fixture_results_in_fixture_order(self):
        provider = FixtureSearchProvider(DATA / "results")
        results = provider.fetch("Angela Merkel", "de")
        assert len(results) == 10
        assert results[0].url == "https://de.wikipedia.org/wiki/Angela_Merkel"
        assert [r.rank for r in results] == list(range(1, 11))

    def test_unknown_entity_empty(self):
        provider = FixtureSearchProvider(DATA / "results")
        assert provider.fetch("No Such Entity", "en") == []

    def test_latest_dated_file_wins(self):
        provider = FixtureSearchProvider(DATA / "results")
        results = provider.fetch("Barack Obama", "en")
        assert "august" in results[31 - 1].url  # period-specific row

    def test_slug(self):
        assert entity_slug("Angela Merkel") == "angela_merkel"
        assert entity_slug("Gerhard Schröder") == "gerhard_schröder"

    def test_malformed_result_file(self, tmp_path):
        bad = tmp_path / "x__en__2020-01-01.tsv"
        bad.write_text("1\thttp://a.example/\ttitle\n", encoding="utf-8")
        with pytest.raises(IngestionError) as exc_info:
            load_result_file(bad)
        assert exc_info.value.line == 1

    def test_non_consecutive_ranks_rejected(self, tmp_path):
        bad = tmp_path / "x__en__2020-01-01.tsv"
        bad.write_text(
            "1\thttp://a.example/\tt\ts\n3\thttp://b.example/\tt\ts\n", encoding="utf-8"
        )
        with pytest.raises(IngestionError):
            load_result_file(bad)


class TestSearch:
    def test_page_one_slice(self):
        provider = FixtureSearchProvider(DATA / "results")
        result_set = search(SearchQuery("Angela Merkel", "de"), provider)
        assert len(result_set.results) == 10
        assert result_set.results[0].rank == 1
        assert result_set.provider_id == "fixture"

    def test_page_offsets(self):
        provider = FixtureSearchProvider(DATA / "results")
        page3 = search(SearchQuery("Barack Obama", "en", page=3), provider)
        assert [r.rank for r in page3.results] == list(range(21, 31))

    def test_short_fixture_gives_partial_then_empty_pages(self):
        provider = FixtureSearchProvider(DATA / "results")
        page1 = search(SearchQuery("Vietnam", "en", page=1), provider)
        page2 = search(SearchQuery("Vietnam", "en", page=2), provider)
        assert len(page1.results) == 3
        assert page2.results == ()

    def test_unknown_entity_empty_set_not_error(self):
        provider = FixtureSearchProvider(DATA / "results")
        result_set = search(SearchQuery("No Such Entity", "en"), provider)
        assert result_set.results == ()


class TestArchiveSpan:
    def test_span_uses_exactly_two_requests(self, cdx):
        server, client = cdx
        span = archive_span("http://example.com/a", client)
        assert span.first_capture == parse_ts14("20010301000000")
        assert span.last_capture == parse_ts14("20151231235959")
        assert span.archived
        assert server.request_counts["http://example.com/a"] == 2

    def test_no_captures(self, cdx):
        server, client = cdx
        span = archive_span("http://example.com/none", client)
        assert not span.archived
        assert span.first_capture is None and span.last_capture is None
        assert server.request_counts["http://example.com/none"] == 2

    def test_single_capture_degenerate_span(self, cdx):
        _, client = cdx
        span = archive_span("http://example.com/single", client)
        assert span.first_capture == span.last_capture

    def test_transport_error_carries_url(self):
        client = CdxArchiveClient("http://127.0.0.1:9/cdx", retries=0, timeout=0.2)
        with pytest.raises(TransportError) as exc_info:
            archive_span("http://example.com/a", client)
        assert exc_info.value.url == "http://example.com/a"

    def test_retry_recovers_from_one_failure(self, cdx):
        server, client = cdx
        server.flaky_urls.add("http://example.com/single")
        span = archive_span("http://example.com/single", client)
        assert span.archived
        server.flaky_urls.clear()

    def test_span_invariants(self):
        with pytest.raises(ValueError):
            ArchiveSpan(url="http://x.example/", first_capture=utc_now(), last_capture=None)
        with pytest.raises(ValueError):
            ArchiveSpan(
                url="http://x.example/",
                first_capture=parse_ts14("20200101000000"),
                last_capture=parse_ts14("20100101000000"),
            )


class TestCapturesAround:
    def test_window_filter_by_hand(self, cdx):
        _, client = cdx
        # captures Jan/Jun/Dec; +-2 months around mid-June keeps only June
        found = captures_around(
            "http://example.com/year",
            datetime(2015, 6, 15, tzinfo=timezone.utc),
            timedelta(days=60),
            client,
        )
        assert found == [parse_ts14("20150610000000")]

    def test_window_covering_all(self, cdx):
        _, client = cdx
        found = captures_around(
            "http://example.com/year",
            datetime(2015, 6, 15, tzinfo=timezone.utc),
            timedelta(days=365),
            client,
        )
        assert len(found) == 3
        assert found == sorted(found)

    def test_empty_window(self, cdx):
        _, client = cdx
        found = captures_around(
            "http://example.com/year",
            datetime(2014, 1, 1, tzinfo=timezone.utc),
            timedelta(days=5),
            client,
        )
        assert found == []

    def test_nonpositive_window_rejected(self, cdx):
        _, client = cdx
        with pytest.raises(ValueError):
            captures_around(
                "http://example.com/year",
                datetime(2015, 1, 1, tzinfo=timezone.utc),
                timedelta(0),
                client,
            )

    def test_matches_brute_force_filter_on_random_sets(self):
        rng = random.Random(555)
        with MockCdxServer() as server:
            client = CdxArchiveClient(server.endpoint)
            for _ in range(25):
                stamps = sorted(
                    f"20{rng.randint(0, 15):02d}{rng.randint(1, 12):02d}"
                    f"{rng.randint(1, 28):02d}{rng.randint(0, 23):02d}0000"
                    for _ in range(rng.randint(0, 12))
                )
                server.captures["http://r.example/"] = stamps
                timepoint = datetime(rng.randint(2001, 2014), rng.randint(1, 12), 15,
                                     tzinfo=timezone.utc)
                window = timedelta(days=rng.randint(1, 900))
                expected = sorted(
                    parse_ts14(ts)
                    for ts in stamps
                    if timepoint - window <= parse_ts14(ts) <= timepoint + window
                )
                assert captures_around("http://r.example/", timepoint, window, client) == expected


class TestLinkResults:
    def result_set(self, urls):
        return SearchResultSet(
            entity_title="x", language="en", page=1,
            results=ranked_results(urls), retrieved_at=utc_now(),
        )

    def test_order_and_rank_preserved(self, cdx):
        _, client = cdx
        urls = ["http://example.com/a", "http://example.com/none", "http://example.com/single"]
        linked = link_results(self.result_set(urls), client)
        assert [row.result.url for row in linked] == urls
        assert [row.result.rank for row in linked] == [1, 2, 3]

    def test_green_link_iff_archived(self, cdx):
        _, client = cdx
        linked = link_results(
            self.result_set(["http://example.com/a", "http://example.com/none"]), client
        )
        archived, unarchived = linked
        assert archived.archive_link == (
            "https://web.archive.org/web/20151231235959/http://example.com/a"
        )
        assert archived.span.archived
        assert unarchived.archive_link is None
        assert not unarchived.span.archived
        assert not unarchived.lookup_failed

    def test_timepoint_prefers_nearby_capture(self, cdx):
        _, client = cdx
        linked = link_results(
            self.result_set(["http://example.com/a"]),
            client,
            timepoint=datetime(2009, 7, 1, tzinfo=timezone.utc),
            window=timedelta(days=30),
        )
        assert "/20090704120000/" in linked[0].archive_link

    def test_timepoint_without_nearby_falls_back_to_latest(self, cdx):
        _, client = cdx
        linked = link_results(
            self.result_set(["http://example.com/single"]),
            client,
            timepoint=datetime(1999, 1, 1, tzinfo=timezone.utc),
            window=timedelta(days=30),
        )
        assert "/20120630120000/" in linked[0].archive_link

    def test_per_row_fault_isolation(self, cdx):
        server, client = cdx
        server.failing_urls.add("http://example.com/single")
        try:
            urls = ["http://example.com/a", "http://example.com/single"]
            linked = link_results(self.result_set(urls), client)
            assert linked[0].archive_link is not None
            assert linked[1].lookup_failed
            assert linked[1].span is None
            assert linked[1].archive_link is None
        finally:
            server.failing_urls.clear()

    def test_empty_result_set(self, cdx):
        _, client = cdx
        assert link_results(self.result_set([]), client) == []

    def test_linked_result_invariant(self):
        result = SearchResult(rank=1, url="http://a.example/", title="t", snippet="s")
        with pytest.raises(ValueError):
            LinkedResult(result=result, live_link=result.url, archive_link="http://arch.example/")


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text or json.dumps(payload)

    def json(self):
        return self._payload


class FakeSession:
    def __init__(self, response=None, error=None):
        self.response = response
        self.error = error
        self.calls = []

    def get(self, url, **kwargs):
        self.calls.append((url, kwargs))
        if self.error is not None:
            raise self.error
        return self.response


class TestLiveProvider:
    def test_maps_web_pages_payload(self):
        payload = {
            "webPages": {
                "value": [
                    {"url": "https://a.example/", "name": "A", "snippet": "sa"},
                    {"url": "https://b.example/", "name": "B", "snippet": "sb"},
                ]
            }
        }
        provider = LiveSearchProvider(
            "https://api.example/search", api_key="k",
            session=FakeSession(FakeResponse(payload=payload)),
        )
        results = provider.fetch("query", "en")
        assert [r.rank for r in results] == [1, 2]
        assert results[0].title == "A"

    def test_non_200_is_provider_error(self):
        provider = LiveSearchProvider(
            "https://api.example/search", api_key="k",
            session=FakeSession(FakeResponse(status_code=403, payload={}, text="denied")),
        )
        with pytest.raises(ProviderError):
            provider.fetch("query", "en")

    def test_unreachable_is_transport_error(self):
        provider = LiveSearchProvider(
            "https://api.example/search", api_key="k",
            session=FakeSession(error=requests.ConnectionError("refused")),
        )
        with pytest.raises(TransportError):
            provider.fetch("query", "en")

    def test_malformed_payload_is_protocol_error(self):
        provider = LiveSearchProvider(
            "https://api.example/search", api_key="k",
            session=FakeSession(FakeResponse(payload={"unexpected": True})),
        )
        with pytest.raises(ProtocolError):
            provider.fetch("query", "en")


class TestTimestamps:
    def test_round_trip(self):
        stamp = "20150820123456"
        assert format_ts14(parse_ts14(stamp)) == stamp

    def test_bad_stamp_rejected(self):
        with pytest.raises(ProtocolError):
            parse_ts14("2015")
        with pytest.raises(ProtocolError):
            parse_ts14("2015089912345x")
