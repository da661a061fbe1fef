"""Shared brute-force oracles for the test suite."""

import itertools

from modlaw.graphs import Graph


def brute_force_isomorphic(g1, g2):
    """Isomorphism by exhaustive permutation search (unlabelled graphs)."""
    if g1.n != g2.n or g1.edge_count != g2.edge_count:
        return False
    for perm in itertools.permutations(range(g1.n)):
        mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in g1.edges}
        if mapped == set(g2.edges):
            return True
    return False


def brute_force_labelled_isomorphic(f1, f2):
    """Label-preserving isomorphism by exhaustive search."""
    if (f1.n != f2.n or f1.edge_count != f2.edge_count
            or f1.label_order != f2.label_order):
        return False
    u1 = list(f1.unlabelled_vertices)
    u2 = list(f2.unlabelled_vertices)
    base = {f1.labels[lab]: f2.labels[lab] for lab in f1.label_order}
    for assign in itertools.permutations(u2, len(u1)):
        perm = dict(base)
        perm.update(zip(u1, assign))
        mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in f1.edges}
        if mapped == set(f2.edges):
            return True
    return False


def all_graphs_exactly(n):
    """Every graph on vertex set 0..n-1 (no isomorphism reduction)."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield Graph(n, [pairs[i] for i in range(len(pairs)) if mask >> i & 1])


def random_graph(rng, n, p=0.5):
    pairs = list(itertools.combinations(range(n), 2))
    return Graph(n, [e for e in pairs if rng.random() < p])
