"""Entity-oriented web archive search gateway.

Modules:
  entity_index    autocompletion trie and page-view aggregation
  entity_graph    link-graph relatedness and inter-language mapping
  search_gateway  search providers, archive linking, URL normalization
  result_cache    append-only snapshot store and refresh policy
  analytics       coverage, overlap and annotation reports
  config/service/cli  the HTTP API and command-line shell
  testing         offline mock archive server and counting doubles
"""

__version__ = "0.1.0"
