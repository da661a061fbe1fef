"""Graphs, labelled pattern graphs, canonical codes, enumeration and sampling.

Vertices are dense integers 0..n-1.  Pattern graphs carry an injective
labelling; the labelled vertices always form an independent set, and
label-preserving isomorphism is required to fix each label's vertex.

Canonical codes are computed by minimising an adjacency encoding over all
vertex orderings compatible with an iterated-refinement colouring (labelled
vertices are pinned first, twin vertices are collapsed).  The minimisation
is exhaustive within those orderings, so equal codes always imply
isomorphism, and the ordering constraints are isomorphism-invariant, so
isomorphic graphs always receive equal codes.

All types here are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

# Patterns stay tiny (enumeration needs <= 7 vertices; the extension-count
# algebra can manufacture slightly larger intermediate patterns).
MAX_CANON_VERTICES = 12
_ORDERING_BUDGET = 250_000


class GraphError(ValueError):
    pass


def _normalize_edges(n, edges):
    out = set()
    for e in edges:
        u, v = e
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {e} out of range for n={n}")
        out.add((u, v) if u < v else (v, u))
    return frozenset(out)


class Graph:
    """Simple undirected graph with O(1) adjacency via per-vertex bitmasks."""

    __slots__ = ("n", "edges", "_adj", "_hash")

    def __init__(self, n, edges=()):
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        self.n = n
        self.edges = _normalize_edges(n, edges)
        adj = [0] * n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self._adj = adj
        self._hash = hash((n, self.edges))

    def adjacent(self, u, v):
        return bool(self._adj[u] >> v & 1)

    def degree(self, u):
        return self._adj[u].bit_count()

    def adj_bits(self, u):
        return self._adj[u]

    def neighbors(self, u):
        bits = self._adj[u]
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    @property
    def edge_count(self):
        return len(self.edges)

    def is_connected(self):
        if self.n <= 1:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            bits = frontier
            while bits:
                low = bits & -bits
                nxt |= self._adj[low.bit_length() - 1]
                bits ^= low
            frontier = nxt & ~seen
            seen |= nxt
        return seen == (1 << self.n) - 1

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, edges={sorted(self.edges)})"


def _label_key(label):
    """Total order on labels: plain ints first, then frozensets of ints."""
    if isinstance(label, int):
        return (0, (label,))
    if isinstance(label, frozenset):
        return (1, tuple(sorted(label)))
    raise GraphError(f"unsupported label type: {label!r}")


class LabelledGraph:
    """Pattern graph with an injective labelling on an independent set.

    ``labels`` maps each label to its unique vertex.  Labels are ints for
    root patterns and frozensets of ints for quotients by a partition.
    """

    __slots__ = ("n", "edges", "labels", "_adj", "_hash", "_code")

    def __init__(self, n, edges=(), labels=None):
        labels = dict(labels or {})
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        self.n = n
        self.edges = _normalize_edges(n, edges)
        if len(set(labels.values())) != len(labels):
            raise GraphError("label map must be injective")
        for lab, v in labels.items():
            _label_key(lab)
            if not 0 <= v < n:
                raise GraphError(f"label {lab!r} points at missing vertex {v}")
        self.labels = dict(sorted(labels.items(), key=lambda kv: _label_key(kv[0])))
        adj = [0] * n
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self._adj = adj
        lab_vs = list(self.labels.values())
        for i, u in enumerate(lab_vs):
            for v in lab_vs[i + 1:]:
                if adj[u] >> v & 1:
                    raise GraphError("labelled vertices must form an independent set")
        self._hash = hash((n, self.edges, tuple(self.labels.items())))
        self._code = None

    @property
    def label_order(self):
        return tuple(self.labels)

    @property
    def labelled_vertices(self):
        return tuple(self.labels.values())

    @property
    def unlabelled_vertices(self):
        pinned = set(self.labels.values())
        return tuple(v for v in range(self.n) if v not in pinned)

    def adjacent(self, u, v):
        return bool(self._adj[u] >> v & 1)

    def adj_bits(self, u):
        return self._adj[u]

    def degree(self, u):
        return self._adj[u].bit_count()

    @property
    def edge_count(self):
        return len(self.edges)

    def unlabelled_part(self):
        """The graph induced on the unlabelled vertices."""
        verts = self.unlabelled_vertices
        pos = {v: i for i, v in enumerate(verts)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(verts), edges)

    def is_label_connected(self):
        core = self.unlabelled_part()
        return core.n >= 1 and core.is_connected()

    def dependent_on(self, label):
        """True when the vertex carrying ``label`` has an incident edge."""
        return self.degree(self.labels[label]) > 0

    def as_host(self):
        return Graph(self.n, self.edges)

    def __eq__(self, other):
        return (isinstance(other, LabelledGraph) and self.n == other.n
                and self.edges == other.edges and self.labels == other.labels)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f"LabelledGraph(n={self.n}, edges={sorted(self.edges)}, "
                f"labels={self.labels})")


# ---------------------------------------------------------------------------
# canonical codes

def _refine_colors(n, adj, init_colors):
    colors = list(init_colors)
    ncolors = len(set(colors))
    while True:
        sigs = []
        for u in range(n):
            neigh = []
            bits = adj[u]
            while bits:
                low = bits & -bits
                neigh.append(colors[low.bit_length() - 1])
                bits ^= low
            neigh.sort()
            sigs.append((colors[u], tuple(neigh)))
        ranking = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        colors = [ranking[s] for s in sigs]
        if len(set(colors)) == ncolors:
            return colors
        ncolors = len(set(colors))


def _twin_groups(members, adj):
    """Split a colour class into groups of mutually interchangeable vertices.

    Two vertices are interchangeable when their neighbourhoods agree off the
    pair itself; swapping them then fixes the adjacency matrix, so only one
    ordering per group arrangement needs to be encoded.
    """
    groups = []
    for v in members:
        placed = False
        for grp in groups:
            u = grp[0]
            mask = ~((1 << u) | (1 << v))
            if adj[u] & mask == adj[v] & mask and (adj[u] >> v & 1) == (adj[v] >> u & 1):
                grp.append(v)
                placed = True
                break
        if not placed:
            groups.append([v])
    return groups


def _multiset_orderings(group_sizes):
    """Distinct sequences of group indices with the given multiplicities."""
    total = sum(group_sizes)
    seq = []
    for gi, size in enumerate(group_sizes):
        seq.extend([gi] * size)

    def rec(remaining):
        if not any(remaining):
            yield ()
            return
        for gi, r in enumerate(remaining):
            if r:
                rest = list(remaining)
                rest[gi] -= 1
                for tail in rec(rest):
                    yield (gi,) + tail

    if total == 0:
        yield ()
    else:
        yield from rec(list(group_sizes))


def _encode_ordering(order, adj):
    bits = 0
    pos = 0
    m = len(order)
    for i in range(m):
        ai = adj[order[i]]
        for j in range(i + 1, m):
            if ai >> order[j] & 1:
                bits |= 1 << pos
            pos += 1
    return bits


def canonical_form(g):
    """Canonical byte code of a graph or labelled pattern graph.

    Equal codes iff the graphs are isomorphic (label-preserving for
    labelled graphs).  Raises for graphs above the supported size.
    """
    if isinstance(g, Graph):
        n, adj = g.n, g._adj
        labelled, label_sig = (), ()
    elif isinstance(g, LabelledGraph):
        n, adj = g.n, g._adj
        labelled = g.labelled_vertices
        label_sig = tuple(_label_key(l) for l in g.label_order)
    else:
        raise GraphError(f"cannot canonicalize {type(g).__name__}")
    if isinstance(g, LabelledGraph) and g._code is not None:
        return g._code
    if n > MAX_CANON_VERTICES:
        raise GraphError(f"canonical_form supports at most {MAX_CANON_VERTICES} vertices, got {n}")

    pinned_rank = {v: i for i, v in enumerate(labelled)}
    init = []
    for v in range(n):
        if v in pinned_rank:
            init.append((0, pinned_rank[v]))
        else:
            lab_adj = tuple(sorted(pinned_rank[u] for u in pinned_rank if adj[v] >> u & 1))
            init.append((1, lab_adj))
    ranking = {c: i for i, c in enumerate(sorted(set(init)))}
    colors = _refine_colors(n, adj, [ranking[c] for c in init])

    classes = {}
    for v in range(n):
        if v not in pinned_rank:
            classes.setdefault(colors[v], []).append(v)
    class_list = [classes[c] for c in sorted(classes)]

    per_class = []
    budget = 1
    for members in class_list:
        groups = _twin_groups(members, adj)
        sizes = [len(grp) for grp in groups]
        orderings = []
        for id_seq in _multiset_orderings(sizes):
            cursor = [0] * len(groups)
            ordering = []
            for gi in id_seq:
                ordering.append(groups[gi][cursor[gi]])
                cursor[gi] += 1
            orderings.append(tuple(ordering))
        per_class.append(orderings)
        budget *= len(orderings)
        if budget > _ORDERING_BUDGET:
            raise GraphError("canonicalization ordering budget exceeded")

    best = None
    prefix = list(labelled)
    for combo in itertools.product(*per_class):
        order = prefix + [v for part in combo for v in part]
        enc = _encode_ordering(order, adj)
        if best is None or enc < best:
            best = enc
    if best is None:
        best = 0

    nbits = n * (n - 1) // 2
    payload = best.to_bytes((nbits + 7) // 8 or 1, "little")
    code = bytes([n, len(labelled)]) + repr(label_sig).encode() + b"|" + payload
    if isinstance(g, LabelledGraph):
        g._code = code
    return code


def code_hex(code):
    return code.hex()


# ---------------------------------------------------------------------------
# enumeration

_ALL_GRAPHS_CACHE = {}
_CONN_CACHE = {}
_LCONN_CACHE = {}


def _all_graphs_upto_iso(m):
    """One representative per isomorphism class of graphs on exactly m vertices."""
    if m in _ALL_GRAPHS_CACHE:
        return _ALL_GRAPHS_CACHE[m]
    if m == 0:
        reps = []
    elif m == 1:
        reps = [Graph(1)]
    else:
        seen = {}
        for g in _all_graphs_upto_iso(m - 1):
            for attach in range(1 << (m - 1)):
                edges = set(g.edges)
                for u in range(m - 1):
                    if attach >> u & 1:
                        edges.add((u, m - 1))
                cand = Graph(m, edges)
                seen.setdefault(canonical_form(cand), cand)
        reps = [seen[c] for c in sorted(seen)]
    _ALL_GRAPHS_CACHE[m] = reps
    return reps


def enumerate_connected(a):
    """Connected graphs with at most ``a`` vertices, one per isomorphism class.

    Order is fixed: by vertex count, then edge count, then canonical code.
    """
    if a > 7:
        raise GraphError("connected-graph enumeration is limited to 7 vertices")
    if a in _CONN_CACHE:
        return _CONN_CACHE[a]
    out = []
    for m in range(1, a + 1):
        level = [g for g in _all_graphs_upto_iso(m) if g.is_connected()]
        level.sort(key=lambda g: (g.n, g.edge_count, canonical_form(g)))
        out.extend(level)
    out = tuple(out)
    _CONN_CACHE[a] = out
    return out


def normalize_labels(labels):
    if isinstance(labels, int):
        labels = tuple(range(1, labels + 1))
    labels = tuple(sorted(labels, key=_label_key))
    if len(set(labels)) != len(labels):
        raise GraphError("duplicate labels")
    return labels


def k1_pattern(labels):
    """The pattern with one isolated unlabelled vertex besides the roots."""
    labels = normalize_labels(labels)
    k = len(labels)
    return LabelledGraph(k + 1, (), {lab: i for i, lab in enumerate(labels)})


def all_labelled_pattern(labels):
    """The pattern consisting of the labelled independent set only."""
    labels = normalize_labels(labels)
    return LabelledGraph(len(labels), (), {lab: i for i, lab in enumerate(labels)})


def enumerate_label_connected(labels, t):
    """Label-connected patterns over ``labels`` with 1..t unlabelled vertices.

    One representative per label-preserving isomorphism class; the unlabelled
    part of every output is connected.  Order: by unlabelled vertex count,
    then edge count, then canonical code.
    """
    labels = normalize_labels(labels)
    k = len(labels)
    if k + t > 7:
        raise GraphError("pattern enumeration is limited to |labels| + bound <= 7")
    key = (labels, t)
    if key in _LCONN_CACHE:
        return _LCONN_CACHE[key]
    out = []
    for m in range(1, t + 1):
        seen = {}
        for core in enumerate_connected(m):
            if core.n != m:
                continue
            base_edges = [(k + u, k + v) for u, v in core.edges]
            label_map = {lab: i for i, lab in enumerate(labels)}
            for attach in range(1 << (k * m)):
                edges = list(base_edges)
                for i in range(k):
                    for u in range(m):
                        if attach >> (i * m + u) & 1:
                            edges.append((i, k + u))
                cand = LabelledGraph(k + m, edges, label_map)
                seen.setdefault(canonical_form(cand), cand)
        level = [seen[c] for c in sorted(seen)]
        level.sort(key=lambda f: (f.n, f.edge_count, canonical_form(f)))
        out.extend(level)
    out = tuple(out)
    _LCONN_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# types of root tuples

@dataclass(frozen=True)
class TypeTau:
    """Equality-and-adjacency profile of a root tuple.

    ``partition`` groups labels mapped to equal vertices; ``block_edges``
    records adjacency between the distinct vertices of two blocks.
    """
    labels: tuple
    partition: frozenset
    block_edges: frozenset

    def block_of(self, label):
        for block in self.partition:
            if label in block:
                return block
        raise KeyError(label)

    @property
    def block_count(self):
        return len(self.partition)

    def blocks_adjacent(self, b1, b2):
        return frozenset((b1, b2)) in self.block_edges

    def is_merged(self, label):
        return len(self.block_of(label)) > 1

    def extends(self, other):
        """True when this type over a superset of labels restricts to ``other``."""
        if not set(other.labels) <= set(self.labels):
            return False
        for i in other.labels:
            for j in other.labels:
                same_here = self.block_of(i) == self.block_of(j)
                same_there = other.block_of(i) == other.block_of(j)
                if same_here != same_there:
                    return False
                if i < j and self.block_of(i) != self.block_of(j):
                    here = self.blocks_adjacent(self.block_of(i), self.block_of(j))
                    there = other.blocks_adjacent(other.block_of(i), other.block_of(j))
                    if here != there:
                        return False
        return True


def make_type(labels, partition, block_edges):
    labels = normalize_labels(labels)
    blocks = frozenset(frozenset(b) for b in partition)
    seen = set()
    for b in blocks:
        if not b or (seen & b):
            raise GraphError("partition blocks must be disjoint and nonempty")
        seen |= b
    if seen != set(labels):
        raise GraphError("partition must cover the label set")
    edges = set()
    for e in block_edges:
        b1, b2 = (frozenset(x) for x in e)
        if b1 == b2 or b1 not in blocks or b2 not in blocks:
            raise GraphError("block edge must join two distinct blocks")
        edges.add(frozenset((b1, b2)))
    return TypeTau(labels, blocks, frozenset(edges))


def type_of(g, w, labels=None):
    """The type of the root tuple ``w`` (indexed by ``labels``) in ``g``."""
    if labels is None:
        labels = tuple(range(1, len(w) + 1))
    labels = normalize_labels(labels)
    if len(w) != len(labels):
        raise GraphError("root tuple length must match the label set")
    for v in w:
        if not 0 <= v < g.n:
            raise GraphError(f"root {v} is not a vertex")
    by_vertex = {}
    for lab, v in zip(labels, w):
        by_vertex.setdefault(v, set()).add(lab)
    blocks = {v: frozenset(ls) for v, ls in by_vertex.items()}
    edges = set()
    verts = list(blocks)
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            if g.adjacent(u, v):
                edges.add(frozenset((blocks[u], blocks[v])))
    return TypeTau(labels, frozenset(blocks.values()), frozenset(edges))


def _partitions_of(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions_of(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1:]
        yield part + [{first}]


def all_types(labels):
    """Every type over the label set, in a fixed deterministic order."""
    labels = normalize_labels(labels)
    out = []
    for part in _partitions_of(labels):
        blocks = [frozenset(b) for b in part]
        pairs = list(itertools.combinations(blocks, 2))
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            out.append(make_type(labels, blocks, edges))
    out.sort(key=_type_sort_key)
    return out


def _type_sort_key(tau):
    part = tuple(sorted(tuple(sorted(b, key=_label_key)) for b in tau.partition))
    edges = tuple(sorted(tuple(sorted((tuple(sorted(x, key=_label_key)) for x in e)))
                         for e in tau.block_edges))
    return (len(part), part, edges)


def types_extending(tau, new_label):
    """All types over labels + {new_label} whose restriction is ``tau``.

    Merged extensions (new label joins an existing block) come first, then
    the singleton extensions with every adjacency pattern to old blocks.
    """
    labels = normalize_labels(tuple(tau.labels) + (new_label,))
    old_blocks = sorted(tau.partition, key=lambda b: tuple(sorted(b, key=_label_key)))
    out = []
    for host in old_blocks:
        blocks = {b: (b | {new_label} if b == host else b) for b in old_blocks}
        edges = [frozenset((blocks[x], blocks[y])) for e in tau.block_edges for x, y in [tuple(e)]]
        out.append(make_type(labels, blocks.values(), edges))
    single = frozenset({new_label})
    for mask in range(1 << len(old_blocks)):
        edges = list(tau.block_edges)
        for i, b in enumerate(old_blocks):
            if mask >> i & 1:
                edges.append(frozenset((single, b)))
        out.append(make_type(labels, list(old_blocks) + [single], edges))
    return out


# ---------------------------------------------------------------------------
# quotients

def quotient(f, partition):
    """Quotient of a labelled pattern by a partition of its label set.

    All vertices with labels in one block are identified into one vertex
    labelled by the block; duplicate edges are dropped.
    """
    blocks = frozenset(frozenset(b) for b in partition)
    seen = set()
    for b in blocks:
        if not b or seen & b:
            raise GraphError("partition blocks must be disjoint and nonempty")
        seen |= b
    if seen != set(f.labels):
        raise GraphError("partition must cover the pattern's label set")

    block_ids = sorted(blocks, key=lambda b: tuple(sorted(b, key=_label_key)))
    vmap = {}
    new_labels = {}
    nxt = 0
    for b in block_ids:
        for lab in b:
            vmap[f.labels[lab]] = nxt
        new_labels[b] = nxt
        nxt += 1
    for v in range(f.n):
        if v not in vmap:
            vmap[v] = nxt
            nxt += 1
    edges = set()
    for u, v in f.edges:
        uu, vv = vmap[u], vmap[v]
        # labelled vertices are independent, so identification cannot create
        # a loop; guard anyway.
        assert uu != vv, "quotient created a self-loop"
        edges.add((uu, vv) if uu < vv else (vv, uu))
    return LabelledGraph(nxt, edges, new_labels)


def tuple_quotient(w, partition, labels=None):
    """Collapse a root tuple along a partition it respects.

    Returns (block_labels, tuple) ordered consistently with quotient().
    """
    if labels is None:
        labels = tuple(range(1, len(w) + 1))
    labels = normalize_labels(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    blocks = sorted((frozenset(b) for b in partition),
                    key=lambda b: tuple(sorted(b, key=_label_key)))
    out = []
    for b in blocks:
        vals = {w[pos[lab]] for lab in b}
        if len(vals) != 1:
            raise GraphError("tuple does not respect the partition")
        out.append(next(iter(vals)))
    return tuple(blocks), tuple(out)


# ---------------------------------------------------------------------------
# random graphs

def _pair_index_matrix(n):
    return np.triu_indices(n, k=1)


def _edge_draw(n, p, seed, stream=0):
    """Deterministic Bernoulli(p) draw for the C(n,2) vertex pairs."""
    if not 0 < p < 1:
        raise GraphError("edge probability must lie strictly between 0 and 1")
    key = [int(seed) & (2**64 - 1), int(stream) & (2**64 - 1)]
    rng = np.random.Generator(np.random.Philox(key=key))
    m = n * (n - 1) // 2
    return rng.random(m) < p


def sample_gnp(n, p, seed, stream=0):
    """Erdős–Rényi graph: every pair present independently with probability p.

    Identical (n, p, seed, stream) always produces the identical graph; the
    generator is the counter-based Philox keyed by (seed, stream).
    """
    draw = _edge_draw(n, p, seed, stream)
    iu, ju = _pair_index_matrix(n)
    edges = [(int(u), int(v)) for u, v, b in zip(iu, ju, draw) if b]
    return Graph(n, edges)


def sample_adjacency(n, p, seed, stream=0):
    """Same draw as sample_gnp, returned as a boolean adjacency matrix."""
    draw = _edge_draw(n, p, seed, stream)
    a = np.zeros((n, n), dtype=bool)
    iu, ju = _pair_index_matrix(n)
    a[iu, ju] = draw
    a |= a.T
    return a


def sample_conditioned(n, p, anchor_vertices, anchor_edges, seed, stream=0):
    """G(n, p) with the subgraph on the anchor vertex set fixed exactly.

    Pairs inside the anchor set follow the anchor edges; all other pairs are
    independently present with probability p, drawn from the same stream as
    sample_gnp (an empty anchor reproduces sample_gnp exactly).
    """
    av = sorted(set(anchor_vertices))
    for v in av:
        if not 0 <= v < n:
            raise GraphError(f"anchor vertex {v} is not a vertex of [0, {n})")
    aset = set(av)
    ae = set()
    for u, v in anchor_edges:
        if u not in aset or v not in aset:
            raise GraphError(f"anchor edge ({u},{v}) leaves the anchor set")
        if u == v:
            raise GraphError("anchor edge is a self-loop")
        ae.add((u, v) if u < v else (v, u))
    draw = _edge_draw(n, p, seed, stream)
    iu, ju = _pair_index_matrix(n)
    edges = []
    for u, v, b in zip(iu, ju, draw):
        u, v = int(u), int(v)
        if u in aset and v in aset:
            if (u, v) in ae:
                edges.append((u, v))
        elif b:
            edges.append((u, v))
    return Graph(n, edges)


def conditioned_adjacency(n, p, anchor_vertices, anchor_edges, seed, stream=0):
    g = sample_conditioned(n, p, anchor_vertices, anchor_edges, seed, stream)
    a = np.zeros((n, n), dtype=bool)
    for u, v in g.edges:
        a[u, v] = a[v, u] = True
    return a


# ---------------------------------------------------------------------------
# JSON and a registry of small named patterns

def graph_to_json(g):
    return json.dumps({"n": g.n, "edges": sorted([list(e) for e in g.edges])},
                      sort_keys=True)


def graph_from_json(text):
    data = json.loads(text) if isinstance(text, str) else text
    if set(data) != {"n", "edges"}:
        raise GraphError('graph JSON must have exactly the keys "n" and "edges"')
    n = data["n"]
    edges = []
    for e in data["edges"]:
        if len(e) != 2:
            raise GraphError(f"malformed edge {e}")
        u, v = e
        if not u < v:
            raise GraphError(f"edge [{u},{v}] must satisfy u < v")
        edges.append((u, v))
    if len(set(map(tuple, edges))) != len(edges):
        raise GraphError("duplicate edges in graph JSON")
    return Graph(n, edges)


def _named_patterns():
    reg = {
        "K1": Graph(1),
        "K2": Graph(2, [(0, 1)]),
        "P3": Graph(3, [(0, 1), (1, 2)]),
        "K3": Graph(3, [(0, 1), (1, 2), (0, 2)]),
        "P4": Graph(4, [(0, 1), (1, 2), (2, 3)]),
        "K13": Graph(4, [(0, 1), (0, 2), (0, 3)]),
        "paw": Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)]),
        "C4": Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
        "diamond": Graph(4, [(0, 1), (1, 2), (0, 2), (0, 3), (2, 3)]),
        "K4": Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        "K14": Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)]),
        "C5": Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
    }
    return reg


PATTERNS = _named_patterns()


def pattern(name):
    try:
        return PATTERNS[name]
    except KeyError:
        raise GraphError(f"unknown pattern name {name!r}; known: {sorted(PATTERNS)}") from None


def rooted_edge(labels=(1,), attached_to=None):
    """Single unlabelled vertex adjacent to the given roots (default: all)."""
    labels = normalize_labels(labels)
    k = len(labels)
    if attached_to is None:
        attached_to = labels
    edges = [(i, k) for i, lab in enumerate(labels) if lab in set(attached_to)]
    return LabelledGraph(k + 1, edges, {lab: i for i, lab in enumerate(labels)})
