import numpy as np
import pytest
from hypothesis import given, strategies as st

from swarmbt.bt import ACTIONS, BehaviorTree, LeafAction, parse
from swarmbt.evaluation import (
    STREAMS, BenchmarkReport, Trial, classify, discrimination_study, jaccard, run_benchmark,
    run_trial, stream_distances,
)
from swarmbt.evolve import EvolutionConfig
from swarmbt.metrics import compute_metrics
from swarmbt.sim import ArenaConfig, init_state, simulate

A = LeafAction
trees = st.lists(st.sampled_from(ACTIONS), min_size=1, max_size=6).map(lambda l: BehaviorTree(tuple(l)))
FAST = EvolutionConfig(population_size=12, generations=3)
SHORT = ArenaConfig(steps=20)


class TestJaccard:
    def test_identical(self):
        t = parse("seq(random,aggregation,northeast)")
        assert jaccard(t, t) == 1.0

    def test_figure_pair(self):
        a = parse("seq(aggregation,random,northeast)")
        b = parse("seq(aggregation,separation,northeast)")
        assert jaccard(a, b) == 0.5

    def test_disjoint(self):
        assert jaccard(parse("seq(random,clustering)"), parse("seq(northeast,southwest)")) == 0.0

    def test_ignores_order_and_repeats(self):
        assert jaccard(parse("seq(random,random,clustering)"), parse("seq(clustering,random)")) == 1.0

    def test_char_mode(self):
        a, b = parse("seq(aggregation)"), parse("seq(dispersion)")
        assert jaccard(a, b, "char") > 0.3 and jaccard(a, b) == 0.0

    @given(trees, trees)
    def test_properties(self, a, b):
        j = jaccard(a, b)
        assert 0 <= j <= 1
        assert j == jaccard(b, a)
        assert jaccard(a, a) == 1


class TestClassify:
    def test_exact_is_order_insensitive(self):
        a = parse("seq(random,aggregation,northeast)")
        assert classify(a, parse("seq(northeast,random,aggregation)"), 1.0) == "exact"

    def test_same_set_different_multiplicity_is_not_exact(self):
        a, b = parse("seq(random,random,northeast)"), parse("seq(random,northeast,northeast)")
        assert classify(a, b, jaccard(a, b)) == "high"

    def test_low(self):
        a, b = parse("seq(random,aggregation,northeast)"), parse("seq(random,clustering,southwest)")
        assert classify(a, b, jaccard(a, b)) == "low"


def _trial(i, orig, got):
    o, g = parse(orig), parse(got)
    j = jaccard(o, g)
    return Trial(i, o, g, j, 0.0, classify(o, g, j))


class TestReport:
    report = BenchmarkReport([
        _trial(0, "seq(random,aggregation,northeast)", "seq(separation,aggregation,northeast)"),
        _trial(1, "seq(random,aggregation,northeast)", "seq(northeast,random,aggregation)"),
        _trial(2, "seq(clustering,southwest,random)", "seq(northwest,dispersion,separation)"),
    ])

    def test_partition(self):
        r = self.report
        assert (r.exact_count, r.high_similarity_count, r.low_similarity_count) == (1, 1, 1)
        assert r.ordered_exact_count == 0
        assert r.mean_jaccard == pytest.approx((0.5 + 1 + 0) / 3)
        assert r.zero_jaccard_trials == [2]

    def test_confusion(self):
        c = self.report.confusion()
        assert c["present"]["random"] == 3
        assert c["missed"]["random"] == 2
        assert c["replaced_by"]["random"]["separation"] == 2
        assert c["missed"]["northeast"] == 0
        assert c["spurious"]["northwest"] == 1


class TestBenchmark:
    def test_trivial_single_leaf(self):
        t = run_trial(0, 5, 1, EvolutionConfig(generations=5), ArenaConfig(),
                      original=parse("seq(northeast)"))
        assert t.jaccard == 1.0 and t.cls == "exact"

    def test_report_shape_and_reproducibility(self):
        a = run_benchmark(3, 3, FAST, SHORT, seed=4)
        b = run_benchmark(3, 3, FAST, SHORT, seed=4)
        assert len(a.trials) == 3
        assert a.exact_count + a.high_similarity_count + a.low_similarity_count == 3
        assert [(t.original, t.extracted, t.final_fitness) for t in a.trials] == \
               [(t.original, t.extracted, t.final_fitness) for t in b.trials]
        assert all(len(t.history) == 3 for t in a.trials)

    def test_parallel_matches_serial(self):
        a = run_benchmark(2, 3, FAST, SHORT, seed=8)
        b = run_benchmark(2, 3, FAST, SHORT, seed=8, jobs=2)
        assert [(t.extracted, t.final_fitness) for t in a.trials] == \
               [(t.extracted, t.final_fitness) for t in b.trials]

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            run_benchmark(0)


class TestDiscrimination:
    def test_same_run_distance_zero(self):
        rng = np.random.default_rng(0)
        tree = parse("seq(random,aggregation,southeast)")
        init = init_state(SHORT, rng)
        m1 = compute_metrics(simulate(tree, init, SHORT, np.random.default_rng(1)))
        m2 = compute_metrics(simulate(tree, init, SHORT, np.random.default_rng(1)))
        assert np.all(stream_distances(m1, m2) == 0)

    def test_shape(self):
        r = discrimination_study(4, 3, SHORT, seed=1)
        assert set(r.distances) == {"same", "different"}
        assert all(d.shape == (4, 9) for d in r.distances.values())
        assert len(list(r.rows())) == 2 * 4 * 9
        assert all((d >= 0).all() for d in r.distances.values())

    def test_different_trees_really_differ(self):
        r = discrimination_study(10, 2, SHORT, seed=2)
        assert all(a.multiset() != b.multiset() for a, b in r.trees["different"])
        assert all(a == b for a, b in r.trees["same"])

    def test_streams_named(self):
        r = discrimination_study(2, 3, SHORT, seed=3)
        assert list(r.means()["same"]) == list(STREAMS)
