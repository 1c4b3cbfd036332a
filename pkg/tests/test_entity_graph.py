import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from archivesearch.entity_graph import (
    InterLanguageMap,
    LinkGraph,
    load_graph,
    load_graph_file,
    load_interlanguage,
    related_entities,
    relatedness,
)
from archivesearch.errors import EntityNotFoundError, IngestionError


def oracle_relatedness(edges, total_articles, e1, e2):
    """Recompute the score from the raw edge list, independent of LinkGraph."""
    s1 = {src for src, dst in edges if dst == e1}
    s2 = {src for src, dst in edges if dst == e2}
    if not s1 or not s2:
        return None
    shared = len(s1 & s2)
    if shared == 0:
        return None
    smaller, larger = min(len(s1), len(s2)), max(len(s1), len(s2))
    if total_articles == smaller:
        return None
    return (math.log(larger) - math.log(shared)) / (
        math.log(total_articles) - math.log(smaller)
    )


def random_edges(rng, max_entities=50, max_edges=200):
    """Random edge list plus the entities actually present in it."""
    entities = [f"e{i}" for i in range(rng.randint(2, max_entities))]
    articles = [f"s{i}" for i in range(rng.randint(1, 40))]
    edges = {
        (rng.choice(articles), rng.choice(entities))
        for _ in range(rng.randint(1, max_edges))
    }
    known = sorted({dst for _, dst in edges} | {src for src, _ in edges})
    return sorted(edges), known


class TestLoadGraph:
    def test_inlink_sets(self):
        graph = load_graph([("a", "x"), ("b", "x"), ("a", "y")], total_articles=10)
        assert graph.inlink_set("x") == {"a", "b"}
        assert graph.inlink_set("y") == {"a"}

    def test_empty_edge_list(self):
        graph = load_graph([], total_articles=5)
        assert graph.inlink_set("anything") == frozenset()

    def test_duplicate_edges_count_once(self):
        graph = load_graph([("a", "x"), ("a", "x")], total_articles=10)
        assert graph.inlink_set("x") == {"a"}

    def test_total_articles_must_cover_largest_set(self):
        with pytest.raises(ValueError):
            LinkGraph(inlinks={"x": frozenset({"a", "b"})}, total_articles=1)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "links.tsv"
        path.write_text("W\t100\na\tx\nb\tx\n", encoding="utf-8")
        graph = load_graph_file(path)
        assert graph.total_articles == 100
        assert graph.inlink_set("x") == {"a", "b"}

    def test_malformed_line_names_line_number(self, tmp_path):
        path = tmp_path / "links.tsv"
        path.write_text("W\t100\na\tx\nbroken\n", encoding="utf-8")
        with pytest.raises(IngestionError) as exc_info:
            load_graph_file(path)
        assert exc_info.value.line == 3

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "links.tsv"
        path.write_text("a\tx\n", encoding="utf-8")
        with pytest.raises(IngestionError):
            load_graph_file(path)


class TestRelatedness:
    def test_identical_inlink_sets_score_zero(self):
        graph = load_graph([("a", "x"), ("b", "x"), ("a", "y"), ("b", "y")], 10)
        assert relatedness("x", "y", graph) == 0.0

    def test_derived_arithmetic_instance(self):
        # |W|=16, |S1|=4, |S2|=2, shared 2: (ln4-ln2)/(ln16-ln2) = ln2/ln8 = 1/3
        edges = [(f"a{i}", "e1") for i in range(1, 5)] + [("a1", "e2"), ("a2", "e2")]
        graph = load_graph(edges, total_articles=16)
        assert relatedness("e1", "e2", graph) == pytest.approx(1 / 3, abs=1e-12)

    def test_disjoint_sets_unrelated(self):
        graph = load_graph([("a", "x"), ("b", "y")], 10)
        assert relatedness("x", "y", graph) is None

    def test_empty_set_unrelated(self):
        graph = load_graph([("a", "x"), ("x", "y")], 10)
        # y has inlinks {x}; x has none (appears only as source)
        assert relatedness("x", "y", graph) is None

    def test_degenerate_denominator_unrelated(self):
        # min(|S1|, |S2|) equals |W|
        graph = load_graph([("a", "x"), ("b", "x"), ("b", "y"), ("c", "y")], 2)
        assert relatedness("x", "y", graph) is None

    def test_absent_entity_raises(self):
        graph = load_graph([("a", "x")], 10)
        with pytest.raises(EntityNotFoundError):
            relatedness("x", "never-seen", graph)

    def test_matches_oracle_on_random_graphs(self):
        rng = random.Random(2718)
        for _ in range(100):
            edges, entities = random_edges(rng)
            w = len({src for src, _ in edges} | set(entities)) + rng.randint(0, 20)
            graph = load_graph(edges, total_articles=w)
            for _ in range(10):
                e1, e2 = rng.choice(entities), rng.choice(entities)
                expected = oracle_relatedness(edges, w, e1, e2)
                actual = relatedness(e1, e2, graph)
                if expected is None:
                    assert actual is None
                else:
                    assert actual == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=60)
    @given(data=st.data())
    def test_symmetry_and_self_distance(self, data):
        rng = random.Random(data.draw(st.integers(0, 10_000)))
        edges, entities = random_edges(rng, max_entities=12, max_edges=40)
        graph = load_graph(edges, total_articles=60)
        e1 = data.draw(st.sampled_from(entities))
        e2 = data.draw(st.sampled_from(entities))
        assert relatedness(e1, e2, graph) == relatedness(e2, e1, graph)
        if graph.inlink_set(e1):
            assert relatedness(e1, e1, graph) == 0.0

    @given(
        sizes=st.tuples(st.integers(2, 30), st.integers(2, 30)),
        w_extra=st.integers(1, 50),
    )
    def test_monotone_in_intersection_at_fixed_sizes(self, sizes, w_extra):
        n1, n2 = sizes
        w = n1 + n2 + w_extra
        previous = None
        for shared in range(1, min(n1, n2) + 1):
            edges = [(f"c{i}", "e1") for i in range(shared)]
            edges += [(f"c{i}", "e2") for i in range(shared)]
            edges += [(f"l{i}", "e1") for i in range(n1 - shared)]
            edges += [(f"r{i}", "e2") for i in range(n2 - shared)]
            graph = load_graph(edges, total_articles=w)
            score = relatedness("e1", "e2", graph)
            assert score is not None and score >= 0
            if previous is not None:
                assert score <= previous + 1e-12
            previous = score

    def test_base_invariance(self):
        # the ratio of log differences is identical in any base
        rng = random.Random(31337)
        edges, entities = random_edges(rng)
        graph = load_graph(edges, total_articles=80)
        for _ in range(50):
            e1, e2 = rng.choice(entities), rng.choice(entities)
            score = relatedness(e1, e2, graph)
            if score is None:
                continue
            s1, s2 = graph.inlink_set(e1), graph.inlink_set(e2)
            shared = len(s1 & s2)
            smaller, larger = sorted((len(s1), len(s2)))
            base2 = (math.log2(larger) - math.log2(shared)) / (
                math.log2(graph.total_articles) - math.log2(smaller)
            )
            assert score == pytest.approx(base2, abs=1e-9)


class TestRelatedEntities:
    def politician_graph(self):
        edges = []
        for source, targets in {
            "a1": ["Merkel", "Schroeder", "Germany"],
            "a2": ["Merkel", "Schroeder", "Germany"],
            "a3": ["Merkel", "Schroeder", "Obama"],
            "a4": ["Merkel", "Schroeder", "Obama"],
            "a5": ["Merkel", "Obama", "Clinton"],
            "a6": ["Merkel", "Obama"],
            "a7": ["Obama", "Trump", "Clinton"],
            "a8": ["Obama", "Trump"],
            "a9": ["Trump", "Clinton"],
            "a10": ["Clinton"],
            "a11": ["Germany"],
        }.items():
            edges.extend((source, target) for target in targets)
        return load_graph(edges, total_articles=1000)

    def test_single_candidate(self):
        graph = load_graph([("a", "e"), ("a", "f")], 10)
        assert [eid for eid, _ in related_entities("e", graph, 5)] == ["f"]

    def test_ranking_ascending_by_score(self):
        graph = self.politician_graph()
        names = [eid for eid, _ in related_entities("Merkel", graph, 8)]
        assert names == ["Schroeder", "Obama", "Germany", "Clinton"]

    def test_k_larger_than_candidates_no_padding(self):
        graph = load_graph([("a", "e"), ("a", "f")], 10)
        assert len(related_entities("e", graph, 99)) == 1

    def test_query_entity_excluded(self):
        graph = self.politician_graph()
        assert all(eid != "Merkel" for eid, _ in related_entities("Merkel", graph, 8))

    def test_absent_entity_raises(self):
        graph = self.politician_graph()
        with pytest.raises(EntityNotFoundError):
            related_entities("Bismarck", graph, 3)

    def test_k_validation(self):
        graph = self.politician_graph()
        with pytest.raises(ValueError):
            related_entities("Merkel", graph, 0)

    def test_popularity_breaks_ties(self):
        # f and g have identical inlink overlap with e; g is more popular
        edges = [("a", "e"), ("a", "f"), ("a", "g"), ("b", "f"), ("c", "g")]
        graph = load_graph(edges, total_articles=100)
        ranked = related_entities("e", graph, 5, popularity={"f": 1, "g": 50})
        assert [eid for eid, _ in ranked] == ["g", "f"]

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(777)
        for _ in range(40):
            edges, entities = random_edges(rng, max_entities=100, max_edges=250)
            w = len({s for s, _ in edges} | set(entities)) + 5
            graph = load_graph(edges, total_articles=w)
            popularity = {e: rng.randint(0, 50) for e in entities}
            query = rng.choice(entities)
            scored = []
            for other in entities:
                if other == query:
                    continue
                score = oracle_relatedness(edges, w, query, other)
                if score is not None:
                    scored.append((other, score))
            scored.sort(key=lambda item: (item[1], -popularity.get(item[0], 0), item[0]))
            k = rng.randint(1, 10)
            actual = related_entities(query, graph, k, popularity)
            assert [eid for eid, _ in actual] == [eid for eid, _ in scored[:k]]


class TestInterLanguage:
    def test_mapped_pair(self):
        mapping = InterLanguageMap()
        mapping.add("en", "climate change", "de", "Klimawandel")
        assert mapping.lookup("climate change", "en", "de") == "Klimawandel"

    def test_symmetry(self):
        mapping = InterLanguageMap()
        mapping.add("en", "climate change", "de", "Klimawandel")
        assert mapping.lookup("Klimawandel", "de", "en") == "climate change"

    def test_unmapped_absent(self):
        mapping = InterLanguageMap()
        assert mapping.lookup("anything", "en", "de") is None

    def test_same_language_rejected(self):
        mapping = InterLanguageMap()
        with pytest.raises(ValueError):
            mapping.lookup("x", "en", "en")

    def test_load_file(self, tmp_path):
        path = tmp_path / "interlang.tsv"
        path.write_text("en\tclimate change\tde\tKlimawandel\n", encoding="utf-8")
        mapping = load_interlanguage(path)
        assert mapping.lookup("climate change", "en", "de") == "Klimawandel"
        assert len(mapping) == 1

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "interlang.tsv"
        path.write_text("en\tclimate change\tde\n", encoding="utf-8")
        with pytest.raises(IngestionError) as exc_info:
            load_interlanguage(path)
        assert exc_info.value.line == 1
