from __future__ import annotations

import io
import random

import pytest

from conftest import random_kg_sources
from kgaug.errors import (
    DuplicateEntityCategory,
    InsufficientDiversity,
    MalformedRow,
    UnknownEntity,
    UnknownEntityInTriple,
)
from kgaug.kg import Triple, load_kg, perturb_kg, triples_with_relation


def kg_from(entities: str, triples: str):
    return load_kg(io.StringIO(entities), io.StringIO(triples))


CHAIN = kg_entities, kg_triples = (
    "A\tdis\nB\tsym\nC\tdis\nD\tdis\n",
    "A\tr1\tB\nB\tr2\tC\nC\tr1\tD\n",
)


class TestLoad:
    def test_direct_construction(self):
        g = kg_from("A\tdis\nB\tsym\n", "A\thasSym\tB\n")
        assert len(g) == 2
        assert len(g.triples) == 1
        a = g.lookup("A")
        assert g.adjacency[a] == [Triple(a, "hasSym", g.lookup("B"))]

    def test_unknown_entity_in_triple(self):
        with pytest.raises(UnknownEntityInTriple):
            kg_from("A\tdis\nB\tsym\n", "A\tr\tZ\n")

    def test_duplicate_category_conflict(self):
        with pytest.raises(DuplicateEntityCategory):
            kg_from("A\tdis\nA\tsym\n", "")

    def test_duplicate_entity_same_category_deduped(self):
        g = kg_from("A\tdis\na\tdis\nB\tsym\n", "")
        assert len(g) == 2

    def test_duplicate_triples_deduped(self):
        g = kg_from("A\tdis\nB\tsym\n", "A\tr\tB\nA\tr\tB\n")
        assert len(g.triples) == 1

    def test_malformed_rows(self):
        with pytest.raises(MalformedRow):
            kg_from("A\n", "")
        with pytest.raises(MalformedRow):
            kg_from("A\tdis\nB\tsym\n", "A\tB\n")
        with pytest.raises(MalformedRow):
            kg_from("A\tdis\n", "A\tr\tA\n")  # self-loop

    def test_reserved_relation_rejected(self):
        with pytest.raises(MalformedRow):
            kg_from("A\tdis\nB\tsym\n", "A\tBelongTo\tB\n")

    def test_comments_and_blanks_ignored(self):
        g = kg_from("# header\n\nA\tdis\nB\tsym\n", "# none\nA\tr\tB\n\n")
        assert g.stats() == {"entities": 2, "categories": 2, "relations": 1, "triples": 1}

    def test_case_folded_lookup(self):
        g = kg_from("Fever\tsymptom\n", "")
        assert g.lookup("FEVER") == 0
        assert g.canonical_of(0) == "Fever"

    def test_reference_scale_stats_readout(self):
        # production-scale shape: 44,111 entities over 7 categories,
        # 10 relation types, 294,149 triples
        rng = random.Random(20240601)
        n_entities, n_triples = 44_111, 294_149
        entities = "\n".join(f"e{i}\tc{i % 7}" for i in range(n_entities))
        triples = set()
        while len(triples) < n_triples:
            h = rng.randrange(n_entities)
            t = rng.randrange(n_entities)
            if h != t:
                triples.add((h, t, len(triples) % 10))
        triple_text = "\n".join(f"e{h}\trel{r}\te{t}" for h, t, r in triples)
        g = kg_from(entities, triple_text)
        assert g.stats() == {
            "entities": 44_111,
            "categories": 7,
            "relations": 10,
            "triples": 294_149,
        }


class TestQueries:
    def test_involved_isolated(self):
        g = kg_from("A\tdis\nB\tsym\n", "")
        assert g.involved_triples(g.lookup("A")) == set()

    def test_involved_chain_middle(self):
        g = kg_from(*CHAIN)
        b = g.lookup("B")
        assert g.involved_triples(b) == {Triple(0, "r1", 1), Triple(1, "r2", 2)}

    def test_involved_matches_scan_oracle(self):
        rng = random.Random(7)
        ent, tri = random_kg_sources(rng, 50, 150, 4)
        g = load_kg(io.StringIO(ent), io.StringIO(tri))
        for e in range(len(g)):
            expected = {t for t in g.triples if t.head == e or t.tail == e}
            assert g.involved_triples(e) == expected

    def test_unknown_entity(self):
        g = kg_from("A\tdis\n", "")
        with pytest.raises(UnknownEntity):
            g.involved_triples(5)
        with pytest.raises(UnknownEntity):
            g.two_hop_candidates(-1)

    def test_two_hop_chain(self):
        g = kg_from(*CHAIN)
        a = g.lookup("A")
        assert g.two_hop_candidates(a) == {Triple(0, "r1", 1), Triple(1, "r2", 2)}

    def test_two_hop_isolated(self):
        g = kg_from("A\tdis\nB\tsym\nZ\tdis\n", "A\tr\tB\n")
        assert g.two_hop_candidates(g.lookup("Z")) == set()

    def test_two_hop_superset_of_involved(self):
        rng = random.Random(11)
        ent, tri = random_kg_sources(rng, 40, 120, 3)
        g = load_kg(io.StringIO(ent), io.StringIO(tri))
        for e in range(len(g)):
            assert g.two_hop_candidates(e) >= g.involved_triples(e)

    def test_same_category_chain(self):
        g = kg_from(*CHAIN)
        assert g.same_category_candidates(g.lookup("A")) == {g.lookup("C")}

    def test_same_category_no_peer(self):
        g = kg_from("A\tdis\nB\tsym\n", "A\tr\tB\n")
        assert g.same_category_candidates(g.lookup("A")) == set()

    def test_same_category_star_of_peers(self):
        g = kg_from(
            "hub\tdis\nn1\tdis\nn2\tdis\nn3\tdis\n",
            "hub\tr\tn1\nhub\tr\tn2\nhub\tr\tn3\n",
        )
        hub = g.lookup("hub")
        assert g.same_category_candidates(hub) == {g.lookup("n1"), g.lookup("n2"), g.lookup("n3")}

    def test_same_category_excludes_self_and_other_categories(self):
        rng = random.Random(3)
        ent, tri = random_kg_sources(rng, 30, 90, 3)
        g = load_kg(io.StringIO(ent), io.StringIO(tri))
        for e in range(len(g)):
            got = g.same_category_candidates(e)
            assert e not in got
            assert all(g.category_of(x) == g.category_of(e) for x in got)

    def test_triples_with_relation(self, medkg):
        mixed = {Triple(0, "r1", 1), Triple(1, "r2", 2), Triple(2, "r1", 3)}
        assert triples_with_relation(mixed, "r1") == {Triple(0, "r1", 1), Triple(2, "r1", 3)}
        assert triples_with_relation(set(), "r1") == set()

        pneumonia = medkg.lookup("pneumonia")
        candidates = medkg.two_hop_candidates(pneumonia)
        got = triples_with_relation(candidates, "hasSymptom")
        assert got == {t for t in candidates if t.relation == "hasSymptom"}
        assert got  # the fixture neighborhood does hold symptom edges

    def test_queries_leave_graph_unmodified(self):
        g = kg_from(*CHAIN)
        before = (set(g.triples), [(e.index, e.canonical, e.category) for e in g.entities])
        for e in range(len(g)):
            g.involved_triples(e)
            g.two_hop_candidates(e)
            g.same_category_candidates(e)
        after = (set(g.triples), [(e.index, e.canonical, e.category) for e in g.entities])
        assert before == after


class TestPerturb:
    def _diff_counts(self, g, p):
        cat_diffs = sum(
            1 for a, b in zip(g.entities, p.entities) if a.category != b.category
        )
        rel_diffs = len(g.triples - p.triples)
        return cat_diffs, rel_diffs

    def test_zero_is_identity(self, medkg):
        p = perturb_kg(medkg, 0, seed=1)
        assert p.triples == medkg.triples
        assert [e.category for e in p.entities] == [e.category for e in medkg.entities]

    def test_ceiling_counts_small(self):
        ent = "\n".join(f"e{i}\tc{i % 3}" for i in range(10))
        tri = "\n".join(f"e{i}\trel{i % 3}\te{(i + 1) % 10}" for i in range(10))
        g = kg_from(ent, tri)
        p = perturb_kg(g, 10, seed=5)
        assert self._diff_counts(g, p) == (1, 1)

    def test_exact_counts_and_cardinality(self, medkg):
        p = perturb_kg(medkg, 25, seed=9)
        cat_diffs, rel_diffs = self._diff_counts(medkg, p)
        assert cat_diffs == -(-25 * len(medkg) // 100)
        assert rel_diffs == -(-25 * len(medkg.triples) // 100)
        assert len(p) == len(medkg)
        assert len(p.triples) == len(medkg.triples)
        # every changed triple kept its endpoints
        changed = {(t.head, t.tail) for t in medkg.triples - p.triples}
        gained = {(t.head, t.tail) for t in p.triples - medkg.triples}
        assert changed == gained

    def test_seed_determinism(self, medkg):
        p1 = perturb_kg(medkg, 30, seed=42)
        p2 = perturb_kg(medkg, 30, seed=42)
        assert p1.triples == p2.triples
        assert [e.category for e in p1.entities] == [e.category for e in p2.entities]
        p3 = perturb_kg(medkg, 30, seed=43)
        different = p3.triples != p1.triples or [e.category for e in p3.entities] != [
            e.category for e in p1.entities
        ]
        assert different

    def test_original_untouched(self, medkg):
        before = set(medkg.triples)
        perturb_kg(medkg, 50, seed=3)
        assert set(medkg.triples) == before

    def test_insufficient_diversity(self):
        g = kg_from("A\tonly\nB\tonly\n", "A\tr\tB\n")
        with pytest.raises(InsufficientDiversity):
            perturb_kg(g, 10, seed=0)
        assert perturb_kg(g, 0, seed=0).triples == g.triples
