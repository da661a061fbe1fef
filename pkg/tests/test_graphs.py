import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modlaw.graphs import (
    Graph,
    GraphError,
    LabelledGraph,
    all_types,
    canonical_form,
    enumerate_connected,
    enumerate_label_connected,
    graph_from_json,
    graph_to_json,
    k1_pattern,
    pattern,
    quotient,
    rooted_edge,
    sample_adjacency,
    sample_conditioned,
    sample_gnp,
    type_of,
    types_extending,
)

from util import all_graphs_exactly, brute_force_isomorphic, random_graph


class TestGraphBasics:
    def test_rejects_self_loops_and_bad_edges(self):
        with pytest.raises(GraphError):
            Graph(3, [(1, 1)])
        with pytest.raises(GraphError):
            Graph(3, [(0, 3)])

    def test_adjacency_symmetric(self):
        g = Graph(4, [(0, 1), (2, 3)])
        for u in range(4):
            for v in range(4):
                assert g.adjacent(u, v) == g.adjacent(v, u)

    def test_labelled_independence_enforced(self):
        with pytest.raises(GraphError):
            LabelledGraph(2, [(0, 1)], {1: 0, 2: 1})

    def test_label_map_injective(self):
        with pytest.raises(GraphError):
            LabelledGraph(2, [], {1: 0, 2: 0})


class TestCanonicalForm:
    def test_path_relabelling(self):
        p1 = Graph(3, [(0, 1), (1, 2)])
        p2 = Graph(3, [(2, 1), (1, 0)])
        assert canonical_form(p1) == canonical_form(p2)

    def test_triangle_vs_path(self):
        assert canonical_form(pattern("K3")) != canonical_form(pattern("P3"))

    def test_all_permutations_one_code(self):
        rng = random.Random(7)
        g = random_graph(rng, 4)
        codes = set()
        for perm in itertools.permutations(range(4)):
            codes.add(canonical_form(
                Graph(4, [(perm[u], perm[v]) for u, v in g.edges])))
        assert len(codes) == 1

    def test_equality_iff_isomorphism_exhaustive(self):
        # every graph on <= 5 vertices: code equality must coincide with
        # brute-force permutation search
        reps = {}
        for n in range(1, 6):
            for g in all_graphs_exactly(n):
                reps.setdefault(canonical_form(g), g)
        reps = list(reps.values())
        for i, g1 in enumerate(reps):
            for g2 in reps[i + 1:]:
                assert not brute_force_isomorphic(g1, g2)

    def test_six_vertex_spotchecks(self):
        rng = random.Random(3)
        for _ in range(200):
            g = random_graph(rng, 6)
            perm = list(range(6))
            rng.shuffle(perm)
            h = Graph(6, [(perm[u], perm[v]) for u, v in g.edges])
            assert canonical_form(g) == canonical_form(h)

    def test_labelled_codes_respect_labels(self):
        # swapping which end is labelled changes nothing for a symmetric
        # pattern but root attachment matters
        e1 = LabelledGraph(3, [(0, 1), (1, 2)], {1: 0})  # root at path end
        e2 = LabelledGraph(3, [(1, 0), (0, 2)], {1: 1})  # same shape, relabelled
        assert canonical_form(e1) == canonical_form(e2)
        mid = LabelledGraph(3, [(0, 1), (0, 2)], {1: 0})  # root at path centre
        assert canonical_form(mid) != canonical_form(e1)

    def test_size_guard(self):
        with pytest.raises(GraphError):
            canonical_form(Graph(13))


class TestEnumeration:
    def test_connected_counts_against_bruteforce(self):
        # oracle: filter all graphs on exactly m vertices, reduce by code
        for a, expected in [(1, 1), (2, 2), (3, 4), (4, 10), (5, 31)]:
            got = enumerate_connected(a)
            assert len(got) == expected
            brute = set()
            for m in range(1, a + 1):
                for g in all_graphs_exactly(m):
                    if g.is_connected():
                        brute.add(canonical_form(g))
            assert {canonical_form(g) for g in got} == brute

    def test_connected_a3_members(self):
        names = {canonical_form(pattern(n)) for n in ("K1", "K2", "P3", "K3")}
        assert {canonical_form(g) for g in enumerate_connected(3)} == names

    def test_connected_a4_adds_six(self):
        names = {canonical_form(pattern(n))
                 for n in ("P4", "K13", "paw", "C4", "diamond", "K4")}
        got = {canonical_form(g) for g in enumerate_connected(4) if g.n == 4}
        assert got == names

    def test_order_deterministic(self):
        a = [canonical_form(g) for g in enumerate_connected(5)]
        b = [canonical_form(g) for g in enumerate_connected(5)]
        assert a == b
        sizes = [g.n for g in enumerate_connected(5)]
        assert sizes == sorted(sizes)

    def test_label_connected_no_labels_matches_connected(self):
        lab = enumerate_label_connected((), 4)
        conn = enumerate_connected(4)
        assert [canonical_form(f) for f in lab] == [canonical_form(g) for g in conn]

    def test_label_connected_one_root_one_vertex(self):
        pats = enumerate_label_connected((1,), 1)
        assert len(pats) == 2
        codes = {canonical_form(p) for p in pats}
        assert canonical_form(k1_pattern((1,))) in codes
        assert canonical_form(rooted_edge((1,))) in codes

    def test_every_output_is_label_connected(self):
        for pats in (enumerate_label_connected((1,), 3),
                     enumerate_label_connected((1, 2), 2)):
            for f in pats:
                assert f.is_label_connected()

    def test_dependence_flag(self):
        assert rooted_edge((1,)).dependent_on(1)
        assert not k1_pattern((1,)).dependent_on(1)

    def test_scale_guard(self):
        with pytest.raises(GraphError):
            enumerate_label_connected((1, 2), 6)


class TestTypes:
    def test_empty_tuple(self):
        tau = type_of(pattern("K3"), ())
        assert tau.block_count == 0

    def test_repeated_entry(self):
        tau = type_of(pattern("K3"), (0, 0))
        assert tau.block_count == 1
        assert not tau.block_edges

    def test_adjacent_pair(self):
        tau = type_of(pattern("K3"), (0, 1))
        assert tau.block_count == 2
        assert len(tau.block_edges) == 1

    def test_extends(self):
        g = Graph(4, [(0, 1), (1, 2)])
        tau = type_of(g, (0,))
        tau_p = type_of(g, (0, 1))
        assert tau_p.extends(tau)
        # merging the new label with the old one is also an extension
        assert type_of(g, (0, 0)).extends(tau)
        # a two-label type never extends a two-label type over other labels
        assert not type_of(g, (0, 1)).extends(type_of(g, (0, 0)))

    def test_types_extending_cover(self):
        g = Graph(5, [(0, 1), (1, 2), (3, 4)])
        for w in itertools.product(range(5), repeat=1):
            tau = type_of(g, w)
            exts = types_extending(tau, 2)
            for v in range(5):
                assert type_of(g, w + (v,)) in exts

    def test_all_types_count(self):
        # partitions of {1,2}: two blocks (one possible edge) or one block
        assert len(all_types((1, 2))) == 3


class TestQuotient:
    def test_identity_quotient(self):
        f = rooted_edge((1, 2), attached_to=(1,))
        q = quotient(f, [{1}, {2}])
        assert q.n == f.n and q.edge_count == f.edge_count

    def test_duplicate_edge_removed(self):
        # two roots sharing one unlabelled neighbour collapse to one edge
        f = LabelledGraph(3, [(0, 2), (1, 2)], {1: 0, 2: 1})
        q = quotient(f, [{1, 2}])
        assert q.n == 2
        assert q.edge_count == 1

    def test_quotient_vertices_distinct(self):
        f = LabelledGraph(4, [(0, 3), (1, 3), (2, 3)], {1: 0, 2: 1, 3: 2})
        q = quotient(f, [{1, 2}, {3}])
        assert len(set(q.labels.values())) == 2


class TestSampling:
    def test_zero_vertices(self):
        g = sample_gnp(0, 0.5, 7)
        assert g.n == 0 and not g.edges

    def test_determinism(self):
        g1 = sample_gnp(5, 0.5, 42)
        g2 = sample_gnp(5, 0.5, 42)
        assert g1.edges == g2.edges
        assert sample_gnp(5, 0.5, 43).edges != g1.edges or True  # seed changes allowed

    def test_rejects_bad_p(self):
        with pytest.raises(GraphError):
            sample_gnp(5, 0.0, 1)
        with pytest.raises(GraphError):
            sample_gnp(5, 1.0, 1)

    def test_edge_count_concentration(self):
        # 100 fixed seeds at n=1000: all within 4 sigma of the mean
        n = 1000
        mean = 0.5 * n * (n - 1) / 2
        sigma = (n * (n - 1) / 2 * 0.25) ** 0.5
        for seed in range(100):
            a = sample_adjacency(n, 0.5, seed)
            edges = int(a.sum()) // 2
            assert abs(edges - mean) < 4 * sigma

    def test_adjacency_matches_graph(self):
        g = sample_gnp(12, 0.4, 9)
        a = sample_adjacency(12, 0.4, 9)
        assert {(u, v) for u, v in g.edges} == {
            (int(u), int(v)) for u, v in zip(*np.nonzero(np.triu(a, 1)))}

    def test_conditioned_full_anchor(self):
        n = 4
        anchor_edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        g = sample_conditioned(n, 0.5, range(n), anchor_edges, 5)
        assert g.edges == Graph(n, anchor_edges).edges

    def test_conditioned_empty_anchor_matches_gnp(self):
        g1 = sample_conditioned(8, 0.3, (), (), 11)
        g2 = sample_gnp(8, 0.3, 11)
        assert g1.edges == g2.edges

    def test_conditioned_forces_edge(self):
        for seed in range(20):
            g = sample_conditioned(6, 0.5, (0, 1), [(0, 1)], seed)
            assert (0, 1) in g.edges

    def test_conditioned_rejects_bad_anchor(self):
        with pytest.raises(GraphError):
            sample_conditioned(4, 0.5, (0, 5), (), 1)

    def test_conditioned_marginal(self):
        # free-pair frequency near p over many seeds
        hits = 0
        trials = 4000
        for seed in range(trials):
            g = sample_conditioned(4, 0.3, (0, 1), [(0, 1)], seed)
            if (2, 3) in g.edges:
                hits += 1
        sigma = (trials * 0.3 * 0.7) ** 0.5
        assert abs(hits - 0.3 * trials) < 4 * sigma


class TestJson:
    def test_roundtrip(self):
        g = Graph(4, [(0, 1), (1, 3)])
        assert graph_from_json(graph_to_json(g)) == g

    def test_rejects_unordered(self):
        with pytest.raises(GraphError):
            graph_from_json(json.dumps({"n": 3, "edges": [[1, 0]]}))

    def test_rejects_duplicates(self):
        with pytest.raises(GraphError):
            graph_from_json(json.dumps({"n": 3, "edges": [[0, 1], [0, 1]]}))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.data())
def test_canonical_invariance_property(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    edges = data.draw(st.sets(st.sampled_from(pairs) if pairs else st.nothing()))
    g = Graph(n, edges)
    perm = data.draw(st.permutations(range(n)))
    h = Graph(n, [(perm[u], perm[v]) for u, v in g.edges])
    assert canonical_form(g) == canonical_form(h)
