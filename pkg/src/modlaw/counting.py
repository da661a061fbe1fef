"""Exact subgraph counting and frequency vectors mod q.

count_inj is a backtracking search over pattern vertices in a connected
elimination order with bitset pruning; counts are exact Python integers.
count_inj_naive enumerates every injective placement with no pruning and is
kept as the independent oracle for the backtracking counter.

A frequency vector collects, for every label-connected pattern with at most
``bound`` unlabelled vertices, the injective-homomorphism count at a root
tuple, reduced mod q.  Vectors may be dict-backed (explicit residues) or
graph-backed (coordinates computed on demand and cached), which lets the
extension-count algebra read coordinates at patterns far beyond any
enumeration bound.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .graphs import (
    Graph,
    GraphError,
    LabelledGraph,
    all_labelled_pattern,
    canonical_form,
    enumerate_label_connected,
    k1_pattern,
    normalize_labels,
    quotient,
    type_of,
    tuple_quotient,
)


def _root_map(f, w):
    order = f.label_order
    if len(w) != len(order):
        raise GraphError(f"root tuple has {len(w)} entries for {len(order)} labels")
    return {f.labels[lab]: w[i] for i, lab in enumerate(order)}


def _search_order(f):
    """Pattern vertices ordered so each is adjacent to an earlier vertex when
    possible (per component); labelled vertices count as anchors."""
    anchored = set(f.labels.values())
    order = []
    remaining = set(f.unlabelled_vertices)
    while remaining:
        cand = [v for v in remaining if f.adj_bits(v) & _bits(anchored | set(order))]
        if cand:
            v = max(cand, key=lambda u: (f.degree(u), -u))
        else:
            v = max(remaining, key=lambda u: (f.degree(u), -u))
        order.append(v)
        remaining.discard(v)
    return order


def _bits(vs):
    b = 0
    for v in vs:
        b |= 1 << v
    return b


def count_inj(f, g, w=()):
    """Number of injective homomorphisms of the pattern into (g, w).

    Labelled pattern vertices are sent to the corresponding roots (which may
    repeat); injectivity is required for every vertex pair that is not
    entirely labelled.  Non-edges of the pattern are unconstrained.
    """
    if isinstance(f, Graph):
        f = LabelledGraph(f.n, f.edges)
    pin = _root_map(f, w)
    for v in pin.values():
        if not 0 <= v < g.n:
            raise GraphError(f"root {v} is not a vertex of the host")
    # pinned edge feasibility: pattern edges between a labelled vertex and an
    # unlabelled one are handled below; labelled-labelled edges cannot exist.
    order = _search_order(f)
    unl = len(order)
    if unl == 0:
        return 1
    used0 = _bits(pin.values())
    if unl > g.n - used0.bit_count():
        return 0
    full = (1 << g.n) - 1
    earlier = []
    for idx, v in enumerate(order):
        prev = []
        bits = f.adj_bits(v)
        for lab_v, host_v in pin.items():
            if bits >> lab_v & 1:
                prev.append(("pin", host_v))
        for jdx in range(idx):
            if bits >> order[jdx] & 1:
                prev.append(("var", jdx))
        earlier.append(prev)

    images = [0] * unl
    total = 0

    def rec(idx, used):
        nonlocal total
        cand = full
        for kind, x in earlier[idx]:
            cand &= g.adj_bits(x if kind == "pin" else images[x])
        cand &= ~used
        if idx == unl - 1:
            total += cand.bit_count()
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            images[idx] = v
            rec(idx + 1, used | low)

    rec(0, used0)
    return total


def count_inj_naive(f, g, w=()):
    """Oracle counter: try every injective assignment, check every edge."""
    if isinstance(f, Graph):
        f = LabelledGraph(f.n, f.edges)
    pin = _root_map(f, w)
    unl = list(f.unlabelled_vertices)
    pinned_imgs = set(pin.values())
    total = 0
    for assign in itertools.permutations(range(g.n), len(unl)):
        if pinned_imgs & set(assign):
            continue
        img = dict(pin)
        img.update(zip(unl, assign))
        if all(g.adjacent(img[u], img[v]) for u, v in f.edges):
            total += 1
    return total


def copy_set(f, g, w=()):
    """The set of edge subsets of g arising as images of the pattern's edges.

    Same search as count_inj, collecting the image edge sets at the leaves.
    """
    if isinstance(f, Graph):
        f = LabelledGraph(f.n, f.edges)
    pin = _root_map(f, w)
    order = _search_order(f)
    unl = len(order)
    used0 = _bits(pin.values())
    out = set()
    full = (1 << g.n) - 1

    def image_edges(img):
        return frozenset(tuple(sorted((img[u], img[v]))) for u, v in f.edges)

    if unl == 0:
        return {image_edges(dict(pin))}
    if unl > g.n - used0.bit_count():
        return out
    earlier = []
    for idx, v in enumerate(order):
        prev = []
        bits = f.adj_bits(v)
        for lab_v, host_v in pin.items():
            if bits >> lab_v & 1:
                prev.append(("pin", host_v))
        for jdx in range(idx):
            if bits >> order[jdx] & 1:
                prev.append(("var", jdx))
        earlier.append(prev)
    images = [0] * unl

    def rec(idx, used):
        cand = full
        for kind, x in earlier[idx]:
            cand &= g.adj_bits(x if kind == "pin" else images[x])
        cand &= ~used
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            images[idx] = v
            if idx == unl - 1:
                img = dict(pin)
                img.update(zip(order, images))
                out.add(image_edges(img))
            else:
                rec(idx + 1, used | low)

    rec(0, used0)
    return out


def count_copies(f, g, w=()):
    """Number of distinct edge-set images of the pattern in (g, w)."""
    return len(copy_set(f, g, w))


def count_aut(f):
    """Automorphisms of a pattern: injective homomorphisms into itself fixing
    every label."""
    if isinstance(f, Graph):
        f = LabelledGraph(f.n, f.edges)
    w = tuple(f.labels[lab] for lab in f.label_order)
    return count_inj(f, f.as_host(), w)


_AUT_CACHE = {}


def aut_of(f):
    code = canonical_form(f)
    if code not in _AUT_CACHE:
        _AUT_CACHE[code] = count_aut(f)
    return _AUT_CACHE[code]


# ---------------------------------------------------------------------------
# frequency vectors

class FreqVector:
    """Residues mod q of pattern counts at a root tuple.

    ``coords`` maps canonical codes to residues.  When ``source`` is set to a
    (graph, roots) pair the vector is graph-backed: any coordinate may be
    requested by pattern and is counted (then cached) on demand; the bound is
    then advisory only.
    """

    __slots__ = ("q", "labels", "bound", "coords", "patterns", "source")

    def __init__(self, q, labels, bound, coords=None, patterns=None, source=None):
        self.q = q
        self.labels = normalize_labels(labels)
        self.bound = bound
        self.coords = dict(coords or {})
        self.patterns = dict(patterns or {})
        self.source = source

    def value(self, pat):
        """Residue at a pattern (graph-backed vectors count lazily)."""
        code = canonical_form(pat)
        if code in self.coords:
            return self.coords[code]
        if self.source is None:
            raise KeyError(f"coordinate {code.hex()} not present in explicit vector")
        g, w = self.source
        r = count_inj(pat, g, w) % self.q
        self.coords[code] = r
        self.patterns[code] = pat
        return r

    def __getitem__(self, code):
        return self.coords[code]

    def __contains__(self, code):
        return code in self.coords

    def getter(self):
        """Coordinate accessor usable by polynomial evaluation."""
        return self.value

    def as_tuple(self, order):
        return tuple(self.coords[c] for c in order)

    def to_json_dict(self):
        order = sorted(self.coords)
        return {
            "q": self.q,
            "coords": {c.hex(): self.coords[c] for c in order},
            "order": [c.hex() for c in order],
        }

    def __repr__(self):
        src = "graph-backed" if self.source else "explicit"
        return (f"FreqVector(q={self.q}, labels={self.labels}, bound={self.bound}, "
                f"{len(self.coords)} coords, {src})")


def graph_backed_freq(g, w, q, labels=None, bound=None):
    if labels is None:
        labels = tuple(range(1, len(w) + 1))
    return FreqVector(q, labels, bound, source=(g, tuple(w)))


def freq_vector(g, w, a, q, labels=None):
    """Explicit frequency vector over all label-connected patterns with at
    most ``a`` unlabelled vertices.  The result is checked against the
    feasibility constraints implied by its type."""
    if labels is None:
        labels = tuple(range(1, len(w) + 1))
    labels = normalize_labels(labels)
    pats = enumerate_label_connected(labels, a)
    coords = {}
    patterns = {}
    for f in pats:
        code = canonical_form(f)
        coords[code] = count_inj(f, g, w) % q
        patterns[code] = f
    fv = FreqVector(q, labels, a, coords, patterns, source=(g, tuple(w)))
    tau = type_of(g, w, labels)
    fs = enumerate_feasible(tau, labels, a, q, g.n % q)
    assert fs.contains(fv), "frequency vector escaped its feasible set"
    return fv


# ---------------------------------------------------------------------------
# feasible sets

class FeasibleSetTooLarge(GraphError):
    pass


class FeasibleSet:
    """Vectors satisfying the divisibility and quotient-equality constraints,
    with the isolated-vertex coordinate pinned to the vertex-count residue.

    Coordinates whose quotient pattern has automorphism count divisible by q
    are forced to 0; quotient-isomorphic coordinates are forced equal; one
    free residue remains per surviving class.  Enumeration is lazy and capped.
    """

    ENUM_CAP = 10**6

    def __init__(self, tau, labels, bound, q, n_residue):
        self.tau = tau
        self.labels = normalize_labels(labels)
        self.bound = bound
        self.q = q
        self.n_residue = n_residue % q
        pats = enumerate_label_connected(self.labels, bound)
        k1_code = canonical_form(k1_pattern(self.labels))
        classes = {}
        self._pattern_by_code = {}
        for f in pats:
            code = canonical_form(f)
            self._pattern_by_code[code] = f
            qcode = canonical_form(quotient(f, tau.partition))
            classes.setdefault(qcode, []).append((code, f))
        self.classes = []
        for qcode in sorted(classes):
            members = classes[qcode]
            rep = members[0][1]
            autq = aut_of(quotient(rep, tau.partition))
            codes = tuple(sorted(c for c, _ in members))
            pinned = None
            if any(c == k1_code for c in codes):
                pinned = (self.n_residue - tau.block_count) % q
            elif autq % q == 0:
                pinned = 0
            self.classes.append({"codes": codes, "aut_quotient": autq, "pinned": pinned})
        self.free_classes = [c for c in self.classes if c["pinned"] is None]

    @property
    def size(self):
        return self.q ** len(self.free_classes)

    def contains(self, fv):
        for cls in self.classes:
            vals = {fv[c] for c in cls["codes"] if c in fv}
            if len(vals) > 1:
                return False
            if not vals:
                continue
            val = vals.pop()
            if cls["pinned"] is not None:
                if val != cls["pinned"]:
                    return False
            elif cls["aut_quotient"] % self.q == 0 and val != 0:
                return False
        return True

    def members(self):
        if self.size > self.ENUM_CAP:
            raise FeasibleSetTooLarge(
                f"feasible set has {self.size} members (cap {self.ENUM_CAP})")
        free = self.free_classes
        for assign in itertools.product(range(self.q), repeat=len(free)):
            coords = {}
            it = iter(assign)
            for cls in self.classes:
                val = cls["pinned"] if cls["pinned"] is not None else next(it)
                for code in cls["codes"]:
                    coords[code] = val
            yield FreqVector(self.q, self.labels, self.bound, coords,
                             dict(self._pattern_by_code))

    def member_tuples(self, order):
        return [fv.as_tuple(order) for fv in self.members()]

    def __iter__(self):
        return self.members()


def enumerate_feasible(tau, labels, a, q, n_residue):
    if not _is_prime(q):
        raise GraphError("feasible-set structure requires a prime modulus")
    return FeasibleSet(tau, labels, a, q, n_residue)


def _is_prime(q):
    if q < 2:
        return False
    for d in range(2, int(math.isqrt(q)) + 1):
        if q % d == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# fast counters on adjacency matrices (used by the Monte Carlo harness)

def _ff(d, k):
    """Falling factorial d(d-1)...(d-k+1), vectorised, as exact ints."""
    out = np.ones_like(d, dtype=np.int64)
    for i in range(k):
        out = out * (d - i)
    return out


def _fast_formulas():
    from .graphs import PATTERNS

    def k1(a, d, m):
        return a.shape[0]

    def k2(a, d, m):
        return 2 * m

    def p3(a, d, m):
        return int(_ff(d, 2).sum())

    def k3(a, d, m):
        a2 = a @ a
        return int((a2 * a).sum())  # = trace(A^3)

    def k13(a, d, m):
        return int(_ff(d, 3).sum())

    def k14(a, d, m):
        return int(_ff(d, 4).sum())

    def p4(a, d, m):
        tri = k3(a, d, m) // 6
        iu, ju = np.nonzero(np.triu(a, 1))
        paths = int(((d[iu] - 1) * (d[ju] - 1)).sum()) - 3 * tri
        return 2 * paths

    def c4(a, d, m):
        a2 = a @ a
        w4 = int((a2 * a2.T).sum())  # = trace(A^4)
        p2 = int(_ff(d, 2).sum())    # = 2 * (#2-edge paths)
        return w4 - 2 * p2 - 2 * m

    def paw(a, d, m):
        a2 = (a @ a).astype(np.int64)
        tri_at = np.diag(a.astype(np.int64) @ a2) // 2
        return 2 * int((tri_at * (d - 2)).sum())

    def diamond(a, d, m):
        a2 = (a @ a).astype(np.int64)
        iu, ju = np.nonzero(np.triu(a, 1))
        codeg = a2[iu, ju]
        return 4 * int((codeg * (codeg - 1) // 2).sum())

    named = {
        "K1": k1, "K2": k2, "P3": p3, "K3": k3, "K13": k13, "K14": k14,
        "P4": p4, "C4": c4, "paw": paw, "diamond": diamond,
    }
    return {canonical_form(PATTERNS[name]): fn for name, fn in named.items()}


_FAST = None


def inj_count_adjacency(pat, a_bool):
    """Injective-homomorphism count of an unlabelled pattern in a host given
    as a boolean adjacency matrix.  Closed-form degree/popcount formulas for
    the common small patterns; generic backtracking otherwise."""
    global _FAST
    if _FAST is None:
        _FAST = _fast_formulas()
    code = canonical_form(pat)
    fn = _FAST.get(code)
    if fn is not None:
        a = a_bool.astype(np.int64)
        d = a.sum(axis=1)
        m = int(a.sum()) // 2
        return int(fn(a, d, m))
    return count_inj(pat, _graph_from_adjacency(a_bool))


def _graph_from_adjacency(a_bool):
    n = a_bool.shape[0]
    iu, ju = np.nonzero(np.triu(a_bool, 1))
    return Graph(n, [(int(u), int(v)) for u, v in zip(iu, ju)])


def rooted_inj_count_adjacency(pat, a_bool, w):
    """Injective count of a labelled pattern at roots w on an adjacency
    matrix.  Patterns with a single unlabelled vertex reduce to a bitset
    intersection; anything else falls back to the generic counter."""
    unl = pat.unlabelled_vertices
    if len(unl) == 1:
        u = unl[0]
        n = a_bool.shape[0]
        pin = _root_map(pat, w)
        mask = np.ones(n, dtype=bool)
        for lv, host in pin.items():
            if pat.adjacent(lv, u):
                mask &= a_bool[host]
        mask[list(set(pin.values()))] = False
        return int(mask.sum())
    return count_inj(pat, _graph_from_adjacency(a_bool), w)
