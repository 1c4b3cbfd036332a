"""Wikipedia link graph: relatedness scoring and related-entity suggestion.

Relatedness between two entities is the log-ratio distance over their
inlink sets: (log max(|S1|,|S2|) - log |S1 ∩ S2|) / (log |W| - log
min(|S1|,|S2|)), with natural logarithms. It is 0 when the two link
neighborhoods coincide and grows as they diverge, so suggestion ranks
ascending. Pairs with no shared inlinking article, an empty inlink set, or
a degenerate denominator (|W| equal to the smaller set) score UNRELATED,
represented as None so serializations stay total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import EntityNotFoundError, IngestionError

UNRELATED: Optional[float] = None


@dataclass
class LinkGraph:
    """Per-entity inlink sets plus the total article count.

    Immutable after load; safe for unlimited concurrent readers. An entity
    is "known" when it appears anywhere in the edge list; unknown ids still
    resolve to an empty inlink set.
    """

    inlinks: dict[str, frozenset[str]]
    total_articles: int
    language: str = "en"
    # source article -> entities it links to; drives candidate generation
    outlinks: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        largest = max((len(s) for s in self.inlinks.values()), default=0)
        if self.total_articles < largest:
            raise ValueError(
                f"total_articles={self.total_articles} smaller than an inlink set ({largest})"
            )

    def inlink_set(self, entity_id: str) -> frozenset[str]:
        return self.inlinks.get(entity_id, frozenset())

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.inlinks or entity_id in self.outlinks


def load_graph(
    edges: Iterable[tuple[str, str]], total_articles: int, language: str = "en"
) -> LinkGraph:
    """Build a graph from (source, target) pairs; duplicates count once."""
    inlinks: dict[str, set[str]] = {}
    outlinks: dict[str, set[str]] = {}
    for source, target in edges:
        inlinks.setdefault(target, set()).add(source)
        outlinks.setdefault(source, set()).add(target)
    return LinkGraph(
        inlinks={k: frozenset(v) for k, v in inlinks.items()},
        total_articles=total_articles,
        language=language,
        outlinks={k: frozenset(v) for k, v in outlinks.items()},
    )


def load_graph_file(path: str | Path, language: str = "en") -> LinkGraph:
    """Parse an edge-list file: a "W <TAB> count" header, then one edge per line."""
    path = Path(path)
    edges: list[tuple[str, str]] = []
    total_articles: int | None = None
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if lineno == 1 and fields[0] == "W":
                if len(fields) != 2:
                    raise IngestionError("malformed W header", path=str(path), line=lineno)
                try:
                    total_articles = int(fields[1])
                except ValueError as exc:
                    raise IngestionError(str(exc), path=str(path), line=lineno) from exc
                continue
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise IngestionError(
                    f"expected 'source<TAB>target', got {line!r}",
                    path=str(path),
                    line=lineno,
                )
            edges.append((fields[0], fields[1]))
    if total_articles is None:
        raise IngestionError("missing 'W <TAB> count' header line", path=str(path), line=1)
    return load_graph(edges, total_articles, language)


def relatedness(e1: str, e2: str, graph: LinkGraph) -> Optional[float]:
    """Log-ratio distance between two entities' inlink neighborhoods.

    Returns a finite score >= 0 (0 means maximally related), or UNRELATED
    (None) when there is no shared evidence or the denominator degenerates.
    Symmetric in its arguments. Raises :class:`EntityNotFoundError` for
    entities absent from the graph.
    """
    for entity in (e1, e2):
        if entity not in graph:
            raise EntityNotFoundError(f"entity {entity!r} not in graph")
    s1 = graph.inlink_set(e1)
    s2 = graph.inlink_set(e2)
    if not s1 or not s2:
        return UNRELATED
    shared = len(s1 & s2)
    if shared == 0:
        return UNRELATED
    smaller, larger = sorted((len(s1), len(s2)))
    if graph.total_articles == smaller:
        return UNRELATED
    return (math.log(larger) - math.log(shared)) / (
        math.log(graph.total_articles) - math.log(smaller)
    )


def related_entities(
    entity_id: str,
    graph: LinkGraph,
    k: int,
    popularity: dict[str, int] | None = None,
) -> list[tuple[str, float]]:
    """The k most related entities, by ascending score.

    Candidates are entities sharing at least one inlinking article with the
    query entity. Ties break toward higher popularity, then ascending id.
    Returns fewer than k entries when the candidate pool is smaller.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if entity_id not in graph:
        raise EntityNotFoundError(f"entity {entity_id!r} not in graph")
    popularity = popularity or {}
    candidates: set[str] = set()
    for article in graph.inlink_set(entity_id):
        candidates.update(graph.outlinks.get(article, frozenset()))
    candidates.discard(entity_id)
    scored = []
    for candidate in candidates:
        score = relatedness(entity_id, candidate, graph)
        if score is not None:
            scored.append((candidate, score))
    scored.sort(key=lambda item: (item[1], -popularity.get(item[0], 0), item[0]))
    return scored[:k]


class InterLanguageMap:
    """Symmetric mapping between the same entity's titles across languages."""

    def __init__(self):
        self._pairs: dict[tuple[str, str], dict[str, str]] = {}

    def add(self, lang1: str, title1: str, lang2: str, title2: str):
        self._pairs.setdefault((lang1, title1), {})[lang2] = title2
        self._pairs.setdefault((lang2, title2), {})[lang1] = title1

    def lookup(self, title: str, from_lang: str, to_lang: str) -> str | None:
        """The mapped title, or None when no pair exists. Languages must differ."""
        if from_lang == to_lang:
            raise ValueError("from_lang and to_lang must differ")
        return self._pairs.get((from_lang, title), {}).get(to_lang)

    def __len__(self) -> int:
        return sum(len(v) for v in self._pairs.values()) // 2


def load_interlanguage(path: str | Path) -> InterLanguageMap:
    """Parse the inter-language TSV: lang1, title1, lang2, title2 per line."""
    path = Path(path)
    mapping = InterLanguageMap()
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4 or not all(fields):
                raise IngestionError(
                    f"expected 'lang1<TAB>title1<TAB>lang2<TAB>title2', got {line!r}",
                    path=str(path),
                    line=lineno,
                )
            mapping.add(fields[0], fields[1], fields[2], fields[3])
    return mapping
