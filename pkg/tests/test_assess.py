from __future__ import annotations

import io
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgaug.assess import (
    ConfidenceRecord,
    SelectionConfig,
    Strategy,
    read_confidences,
    sampling_weights,
    select,
    write_scoring_requests,
)
from kgaug.errors import EmptyInput, MalformedRow, MissingConfidence
from kgaug.records import AugmentedSample


def make_augs(probs: dict[str, float], origin="o1") -> tuple[list[AugmentedSample], list[ConfidenceRecord]]:
    augs = [AugmentedSample(aug_id, origin, f"text {aug_id}", "lab", "KGER") for aug_id in probs]
    confs = [ConfidenceRecord(aug_id, p) for aug_id, p in probs.items()]
    return augs, confs


def rng_factory(seed=0):
    return lambda origin_id: random.Random(f"{seed}:{origin_id}")


class TestSamplingWeights:
    def test_uniform_at_delta(self):
        w = sampling_weights([0.75, 0.75, 0.75], 0.75)
        assert all(abs(x - 1 / 3) < 1e-12 for x in w)

    def test_reference_values(self):
        w = sampling_weights([0.75, 0.95, 0.15], 0.75)
        expected = [0.42239, 0.34582, 0.23180]
        for got, want in zip(w, expected):
            assert abs(got - want) < 1e-4

    def test_single_sample(self):
        assert sampling_weights([0.2], 0.75) == [1.0]

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            sampling_weights([], 0.75)

    def test_matches_unstabilized_softmax(self):
        probs = [0.1, 0.33, 0.5, 0.77, 0.9]
        delta = 0.6
        xi = [1 - abs(delta - p) for p in probs]
        naive = [math.exp(x) / sum(math.exp(y) for y in xi) for x in xi]
        got = sampling_weights(probs, delta)
        assert all(abs(a - b) < 1e-12 for a, b in zip(got, naive))

    @given(
        st.lists(st.floats(0, 1), min_size=1, max_size=20),
        st.floats(0.05, 0.95),
    )
    def test_sums_to_one_and_monotone(self, probs, delta):
        w = sampling_weights(probs, delta)
        assert abs(sum(w) - 1.0) < 1e-12
        for i, pa in enumerate(probs):
            for j, pb in enumerate(probs):
                if abs(delta - pa) < abs(delta - pb) - 1e-12:
                    assert w[i] > w[j]


class TestDefaults:
    def test_selection_defaults(self):
        cfg = SelectionConfig()
        assert cfg.delta == 0.75
        assert cfg.per_origin == 5
        assert cfg.strategy is Strategy.DELTA_K


class TestSelect:
    def test_all_returned_when_k_exceeds_m(self):
        augs, confs = make_augs({"a": 0.9, "b": 0.5, "c": 0.2})
        for strategy in Strategy:
            cfg = SelectionConfig(0.75, 5, strategy)
            got = select(augs, confs, cfg, rng_factory())
            assert sorted(s.aug_id for s in got) == ["a", "b", "c"]

    def test_top_k_ordering(self):
        augs, confs = make_augs({"a": 0.9, "b": 0.99, "c": 0.5})
        cfg = SelectionConfig(0.75, 2, Strategy.TOP_K)
        got = select(augs, confs, cfg, rng_factory())
        assert [s.aug_id for s in got] == ["b", "a"]

    def test_top_k_ties_break_on_aug_id(self):
        augs, confs = make_augs({"b": 0.9, "a": 0.9, "c": 0.9})
        cfg = SelectionConfig(0.75, 2, Strategy.TOP_K)
        got = select(augs, confs, cfg, rng_factory())
        assert [s.aug_id for s in got] == ["a", "b"]

    def test_no_duplicates_and_size_bound(self):
        probs = {f"x{i}": (i % 10) / 10 for i in range(12)}
        augs, confs = make_augs(probs)
        for strategy in (Strategy.DELTA_K, Strategy.RANDOM):
            cfg = SelectionConfig(0.75, 5, strategy)
            got = select(augs, confs, cfg, rng_factory(1))
            ids = [s.aug_id for s in got]
            assert len(ids) == len(set(ids)) == 5

    def test_per_origin_grouping(self):
        augs_a, confs_a = make_augs({"a1": 0.7, "a2": 0.8}, origin="oa")
        augs_b, confs_b = make_augs({"b1": 0.7, "b2": 0.8, "b3": 0.9}, origin="ob")
        cfg = SelectionConfig(0.75, 2, Strategy.DELTA_K)
        got = select(augs_a + augs_b, confs_a + confs_b, cfg, rng_factory(3))
        by_origin = {}
        for s in got:
            by_origin.setdefault(s.origin_id, []).append(s.aug_id)
        assert len(by_origin["oa"]) == 2
        assert len(by_origin["ob"]) == 2

    def test_missing_confidence_is_hard_error(self):
        augs, confs = make_augs({"a": 0.5, "b": 0.5})
        with pytest.raises(MissingConfidence):
            select(augs, confs[:1], SelectionConfig(), rng_factory())

    def test_deterministic_per_seed(self):
        probs = {f"x{i}": (i * 37 % 100) / 100 for i in range(9)}
        augs, confs = make_augs(probs)
        cfg = SelectionConfig(0.75, 4, Strategy.DELTA_K)
        first = select(augs, confs, cfg, rng_factory(5))
        second = select(augs, confs, cfg, rng_factory(5))
        assert [s.aug_id for s in first] == [s.aug_id for s in second]

    def test_single_draw_favors_prob_nearest_delta(self):
        augs, confs = make_augs({"near": 0.74, "far": 0.1, "high": 0.99})
        cfg = SelectionConfig(0.75, 1, Strategy.DELTA_K)
        counts = {"near": 0, "far": 0, "high": 0}
        for trial in range(2000):
            got = select(augs, confs, cfg, rng_factory(trial))
            counts[got[0].aug_id] += 1
        assert counts["near"] > counts["high"] > counts["far"]


class TestScorerFiles:
    def test_round_trip(self, tmp_path):
        augs, _ = make_augs({"a": 0.5, "b": 0.5})
        req = tmp_path / "req.jsonl"
        write_scoring_requests(augs, req)
        lines = req.read_text(encoding="utf-8").strip().split("\n")
        assert len(lines) == 2
        assert '"augId": "a"' in lines[0]

        conf = tmp_path / "conf.jsonl"
        conf.write_text('{"augId": "a", "probTrueLabel": 0.5}\n{"augId": "b", "probTrueLabel": 1.0}\n')
        records = read_confidences(conf)
        assert [(r.aug_id, r.prob_true_label) for r in records] == [("a", 0.5), ("b", 1.0)]

    def test_bad_probability_rejected(self):
        with pytest.raises(MalformedRow):
            read_confidences(io.StringIO('{"augId": "a", "probTrueLabel": 1.7}\n'))
        with pytest.raises(ValueError):
            ConfidenceRecord("a", -0.1)

    def test_missing_fields_rejected(self):
        with pytest.raises(MalformedRow):
            read_confidences(io.StringIO('{"augId": "a"}\n'))
