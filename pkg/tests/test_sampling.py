import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from regdecomp.generators import preferential_attachment
from regdecomp.sampling import (betweenness_references, path_frequencies,
                                top_frequency_nodes, uniform_references)

from .conftest import make_graph


class TestUniform:
    def test_all_nodes(self, path10):
        refs = uniform_references(path10, 10, 0)
        assert sorted(refs.nodes.tolist()) == list(range(10))

    def test_single_node_is_uniform(self, path10):
        picks = [uniform_references(path10, 1, s).nodes[0] for s in range(3000)]
        counts = np.bincount(picks, minlength=10)
        assert stats.chisquare(counts).pvalue > 1e-3

    def test_deterministic(self, path10):
        a = uniform_references(path10, 4, 123).nodes
        b = uniform_references(path10, 4, 123).nodes
        assert np.array_equal(a, b) and len(set(a.tolist())) == 4

    @pytest.mark.parametrize("m", [0, 11])
    def test_bad_size(self, path10, m):
        with pytest.raises(ValueError):
            uniform_references(path10, m, 0)


class TestBetweenness:
    def test_star_center_first(self, star5):
        refs = betweenness_references(star5, 20, 2, 0)
        assert refs.nodes[0] == 0

    def test_path_tie_break(self, path10):
        counts = path_frequencies(path10, [(0, 9)])
        assert counts.tolist() == [1] * 10
        assert top_frequency_nodes(counts, 3).tolist() == [0, 1, 2]

    def test_fewer_than_m(self):
        g = make_graph([(0, 1), (1, 2), (2, 3)], 4)
        counts = path_frequencies(g, [(0, 1)])
        assert top_frequency_nodes(counts, 5).tolist() == [0, 1]

    def test_disconnected(self):
        g = make_graph([(0, 1), (2, 3)], 4)
        with pytest.raises(ValueError):
            betweenness_references(g, 5, 2, 0)

    def test_directed_needs_strong_connectivity(self):
        g = make_graph([(0, 1), (1, 2)], 3, directed=True)
        with pytest.raises(ValueError):
            betweenness_references(g, 5, 2, 0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32), st.integers(1, 40), st.integers(1, 60))
    def test_invariants(self, seed, pairs, m):
        g = preferential_attachment(60, 2, 4)
        refs = betweenness_references(g, pairs, m, seed)
        again = betweenness_references(g, pairs, m, seed)
        assert np.array_equal(refs.nodes, again.nodes)
        assert len(set(refs.nodes.tolist())) == len(refs.nodes)
        assert (np.diff(refs.frequencies) <= 0).all()
        rng = np.random.default_rng(seed)
        src = rng.integers(60, size=pairs)
        dst = rng.integers(59, size=pairs)
        dst += dst >= src
        distinct = np.count_nonzero(path_frequencies(g, zip(src, dst)))
        assert len(refs) == min(m, distinct)

    @pytest.mark.slow
    def test_selects_high_degree_nodes(self):
        # top-30 path nodes on a 5000-node preferential attachment graph
        ok = 0
        for seed in range(10):
            g = preferential_attachment(5000, 3, seed)
            deg = g.degrees()
            refs = betweenness_references(g, 100, 30, seed)
            ok += deg[refs.nodes].mean() >= 3 * deg.mean()
        assert ok >= 10

    def test_save(self, tmp_path, star5):
        refs = betweenness_references(star5, 10, 3, 1)
        refs.save(tmp_path / "r.csv", star5, tmp_path / "r.json")
        lines = (tmp_path / "r.csv").read_text().splitlines()
        assert lines[0] == "node_id" and lines[1] == "0"
        meta = json.loads((tmp_path / "r.json").read_text())
        assert meta["strategy"] == "betweenness" and meta["num_pairs"] == 10
