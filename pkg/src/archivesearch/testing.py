"""Offline test doubles: a CDX-protocol archive server and counting wrappers.

The mock archive speaks the same wire format as the real client expects
(GET /cdx with url/order/limit or url/from/to, newline-separated 14-digit
timestamps) so tests and the demo run against genuine HTTP without any
network access.
"""

from __future__ import annotations

import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .search_gateway import SearchProvider, SearchResult


class MockCdxServer:
    """A local archive endpoint backed by an in-memory capture table.

    ``captures`` maps URL -> list of 14-digit timestamp strings. URLs listed
    in ``failing_urls`` answer 500, for fault-injection tests. Request
    counts are tracked per URL.
    """

    def __init__(self, captures: dict[str, list[str]] | None = None):
        self.captures: dict[str, list[str]] = dict(captures or {})
        self.failing_urls: set[str] = set()
        self.flaky_urls: set[str] = set()  # 500 on the first request only
        self.request_counts: Counter[str] = Counter()
        self.total_requests = 0
        self._lock = threading.Lock()
        mock = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                parts = urlsplit(self.path)
                params = {k: v[0] for k, v in parse_qs(parts.query).items()}
                url = params.get("url", "")
                with mock._lock:
                    mock.request_counts[url] += 1
                    mock.total_requests += 1
                    count = mock.request_counts[url]
                if url in mock.failing_urls or (url in mock.flaky_urls and count == 1):
                    self.send_response(500)
                    self.end_headers()
                    return
                stored = sorted(mock.captures.get(url, []))
                if "from" in params or "to" in params:
                    low = params.get("from", "0" * 14)
                    high = params.get("to", "9" * 14)
                    stored = [ts for ts in stored if low <= ts <= high]
                elif params.get("order") == "desc":
                    stored = stored[::-1]
                if "limit" in params:
                    stored = stored[: int(params["limit"])]
                body = "\n".join(stored).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/plain; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=lambda: self._server.serve_forever(poll_interval=0.05), daemon=True
        )

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/cdx"

    def start(self) -> "MockCdxServer":
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()

    def reset_counts(self):
        with self._lock:
            self.request_counts.clear()
            self.total_requests = 0

    def __enter__(self) -> "MockCdxServer":
        return self.start()

    def __exit__(self, *exc_info):
        self.stop()


class CountingProvider:
    """Wraps a provider and counts fetch calls, for cache-contract tests."""

    def __init__(self, inner: SearchProvider):
        self.inner = inner
        self.provider_id = inner.provider_id
        self.fetch_calls = 0

    def fetch(
        self, entity_title: str, language: str, market: str | None = None
    ) -> list[SearchResult]:
        self.fetch_calls += 1
        return self.inner.fetch(entity_title, language, market)
