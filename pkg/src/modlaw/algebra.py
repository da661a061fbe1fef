"""Frequency arithmetic: gluing products, reduction polynomials, the
extension relation between root tuples, and extension counting mod q.

The product of two injective counts expands as a sum of counts of glued
patterns, one per partial matching between the unlabelled vertex sets.  That
identity drives everything here:

  * delta_polynomial writes the count of an arbitrary pattern as an integer
    polynomial in the counts of label-connected patterns;
  * lambda_count expands the indicator of "the extended tuple (w, v) has type
    tau' and frequency vector f'" into such a polynomial, which makes the
    number of witnesses v (mod q, q prime) a function of the frequency vector
    at w alone;
  * complete_extension reconstructs a full frequency vector at (w, v) from
    the coordinates at patterns that actually touch the new root.

Memo tables (gluing products, reduction polynomials, lambda expansions) are
module-level: populate them from one thread, then share freely; concurrent
reads after a warm-up pass are safe.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from .graphs import (
    GraphError,
    LabelledGraph,
    all_labelled_pattern,
    canonical_form,
    enumerate_label_connected,
    k1_pattern,
    normalize_labels,
    quotient,
)
from .counting import FreqVector, aut_of, _is_prime


# ---------------------------------------------------------------------------
# partial matchings and gluing

def _as_pattern(f):
    from .graphs import Graph
    if isinstance(f, Graph):
        return LabelledGraph(f.n, f.edges)
    return f


def partial_matchings(f1, f2):
    """All one-to-one relations between the unlabelled vertex sets, including
    the empty one."""
    f1, f2 = _as_pattern(f1), _as_pattern(f2)
    if f1.label_order != f2.label_order:
        raise GraphError("patterns must share one label set")
    u1 = list(f1.unlabelled_vertices)
    u2 = list(f2.unlabelled_vertices)
    out = []
    for size in range(min(len(u1), len(u2)) + 1):
        for left in itertools.combinations(u1, size):
            for right in itertools.permutations(u2, size):
                out.append(tuple(zip(left, right)))
    return out


def glue(f1, f2, eta=()):
    """Union of two patterns after identifying equal labels and the matched
    unlabelled pairs; duplicate edges collapse."""
    f1, f2 = _as_pattern(f1), _as_pattern(f2)
    if f1.label_order != f2.label_order:
        raise GraphError("patterns must share one label set")
    eta = tuple(eta)
    seen1 = set()
    seen2 = set()
    unl1 = set(f1.unlabelled_vertices)
    unl2 = set(f2.unlabelled_vertices)
    for a, b in eta:
        if a not in unl1 or b not in unl2:
            raise GraphError("matching may only touch unlabelled vertices")
        if a in seen1 or b in seen2:
            raise GraphError("matching must be one-to-one")
        seen1.add(a)
        seen2.add(b)

    vmap1 = {}
    labels = {}
    nxt = 0
    for lab in f1.label_order:
        vmap1[f1.labels[lab]] = nxt
        labels[lab] = nxt
        nxt += 1
    for v in f1.unlabelled_vertices:
        vmap1[v] = nxt
        nxt += 1
    vmap2 = {f2.labels[lab]: labels[lab] for lab in f2.label_order}
    partner = {b: a for a, b in eta}
    for v in f2.unlabelled_vertices:
        if v in partner:
            vmap2[v] = vmap1[partner[v]]
        else:
            vmap2[v] = nxt
            nxt += 1
    edges = set()
    for u, v in f1.edges:
        a, b = vmap1[u], vmap1[v]
        edges.add((a, b) if a < b else (b, a))
    for u, v in f2.edges:
        a, b = vmap2[u], vmap2[v]
        edges.add((a, b) if a < b else (b, a))
    return LabelledGraph(nxt, edges, labels)


class FormalSum:
    """Integer combination of labelled patterns, merged by canonical code."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for pat, coeff in terms:
                self.add(pat, coeff)

    def add(self, pat, coeff):
        if coeff == 0:
            return
        code = canonical_form(pat)
        if code in self.terms:
            pat0, c0 = self.terms[code]
            c0 += coeff
            if c0 == 0:
                del self.terms[code]
            else:
                self.terms[code] = (pat0, c0)
        else:
            self.terms[code] = (pat, coeff)

    def items(self):
        return [(self.terms[c][0], self.terms[c][1]) for c in sorted(self.terms)]

    def scaled(self, k):
        out = FormalSum()
        for pat, c in self.items():
            out.add(pat, c * k)
        return out

    def plus(self, other):
        out = FormalSum(self.items())
        for pat, c in other.items():
            out.add(pat, c)
        return out

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return " + ".join(f"{c}*[{code.hex()[:10]}]" for code, (_, c) in sorted(self.terms.items()))


_PRODUCT_MEMO = {}


def product_expand(f1, f2):
    """Expansion of a product of two injective counts as a formal sum: the
    counts of the glued patterns, summed over all partial matchings, equal
    the product on every host and root tuple."""
    f1, f2 = _as_pattern(f1), _as_pattern(f2)
    key = (canonical_form(f1), canonical_form(f2))
    if key in _PRODUCT_MEMO:
        return _PRODUCT_MEMO[key]
    out = FormalSum()
    for eta in partial_matchings(f1, f2):
        out.add(glue(f1, f2, eta), 1)
    _PRODUCT_MEMO[key] = out
    return out


def _sum_product(s1, s2):
    out = FormalSum()
    for p1, c1 in s1.items():
        for p2, c2 in s2.items():
            expanded = product_expand(p1, p2)
            for pat, c in expanded.items():
                out.add(pat, c1 * c2 * c)
    return out


# ---------------------------------------------------------------------------
# reduction to label-connected patterns

class FreqPolynomial:
    """Sparse integer polynomial in variables indexed by label-connected
    patterns (canonical codes); monomials are multisets of codes."""

    __slots__ = ("terms", "variables")

    def __init__(self):
        self.terms = {}
        self.variables = {}

    @classmethod
    def constant(cls, c):
        p = cls()
        if c != 0:
            p.terms[()] = c
        return p

    @classmethod
    def variable(cls, pat):
        p = cls()
        code = canonical_form(pat)
        p.terms[(code,)] = 1
        p.variables[code] = pat
        return p

    def _absorb_vars(self, other):
        self.variables.update(other.variables)

    def add_term(self, mono, coeff):
        if coeff == 0:
            return
        cur = self.terms.get(mono, 0) + coeff
        if cur == 0:
            self.terms.pop(mono, None)
        else:
            self.terms[mono] = cur

    def plus(self, other):
        out = FreqPolynomial()
        out.terms = dict(self.terms)
        out.variables = dict(self.variables)
        out._absorb_vars(other)
        for mono, c in other.terms.items():
            out.add_term(mono, c)
        return out

    def scaled(self, k):
        out = FreqPolynomial()
        if k != 0:
            out.terms = {m: c * k for m, c in self.terms.items()}
        out.variables = dict(self.variables)
        return out

    def times(self, other):
        out = FreqPolynomial()
        out.variables = dict(self.variables)
        out._absorb_vars(other)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out.add_term(tuple(sorted(m1 + m2)), c1 * c2)
        return out

    def evaluate(self, value_of):
        """Exact integer evaluation; value_of maps a pattern to its count."""
        total = 0
        for mono, c in self.terms.items():
            prod = c
            for code in mono:
                prod *= value_of(self.variables[code])
            total += prod
        return total

    def evaluate_mod(self, value_of, q):
        total = 0
        for mono, c in self.terms.items():
            prod = c % q
            for code in mono:
                if prod == 0:
                    break
                prod = prod * (value_of(self.variables[code]) % q) % q
            total = (total + prod) % q
        return total

    @property
    def support(self):
        return frozenset(code for mono in self.terms for code in mono)

    def pretty(self, names=None):
        """Human-readable term list; names maps codes to display strings."""
        if not self.terms:
            return "0"
        names = names or {}
        parts = []
        for mono in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[mono]
            factors = []
            for code, grp in itertools.groupby(mono):
                e = len(list(grp))
                base = names.get(code, "X_" + code.hex()[:8])
                factors.append(base if e == 1 else f"{base}^{e}")
            body = "*".join(factors) if factors else "1"
            if c == 1 and factors:
                parts.append(body)
            elif c == -1 and factors:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}" if factors else f"{c}")
        return " + ".join(parts).replace("+ -", "- ")


_DELTA_MEMO = {}


def _label_components(f):
    """Split a pattern into label-connected pieces: one per connected
    component of the unlabelled part, each keeping the full label set."""
    core = f.unlabelled_part()
    unl = list(f.unlabelled_vertices)
    comp_of = {}
    for start in range(core.n):
        if start in comp_of:
            continue
        stack = [start]
        comp_of[start] = start
        while stack:
            u = stack.pop()
            for v in core.neighbors(u):
                if v not in comp_of:
                    comp_of[v] = start
                    stack.append(v)
    comps = {}
    for idx, root in comp_of.items():
        comps.setdefault(root, []).append(unl[idx])
    return [sorted(vs) for _, vs in sorted(comps.items())]


def _induced_pattern(f, keep_unlabelled):
    keep = list(f.labels.values()) + list(keep_unlabelled)
    pos = {v: i for i, v in enumerate(keep)}
    edges = [(pos[u], pos[v]) for u, v in f.edges if u in pos and v in pos]
    labels = {lab: pos[v] for lab, v in f.labels.items()}
    return LabelledGraph(len(keep), edges, labels)


def delta_polynomial(f, split="first"):
    """Integer polynomial expressing the injective count of an arbitrary
    pattern through the counts of label-connected patterns.

    Base cases: a label-connected pattern is its own variable; a pattern with
    no unlabelled vertices counts exactly one injective homomorphism, so it
    reduces to the constant 1.  Otherwise split off one label-connected piece
    and recurse through the gluing identity.
    """
    from .graphs import Graph
    if isinstance(f, Graph):
        f = LabelledGraph(f.n, f.edges)
    code = canonical_form(f)
    memo_key = (code, split)
    if memo_key in _DELTA_MEMO:
        return _DELTA_MEMO[memo_key]
    comps = _label_components(f)
    if not comps:
        poly = FreqPolynomial.constant(1)
    elif len(comps) == 1:
        poly = FreqPolynomial.variable(f)
    else:
        pick = 0 if split == "first" else len(comps) - 1
        f1 = _induced_pattern(f, comps[pick])
        rest = [v for i, c in enumerate(comps) if i != pick for v in c]
        f2 = _induced_pattern(f, rest)
        poly = delta_polynomial(f1, split).times(delta_polynomial(f2, split))
        for eta in partial_matchings(f1, f2):
            if eta:
                poly = poly.plus(delta_polynomial(glue(f1, f2, eta), split).scaled(-1))
    _DELTA_MEMO[memo_key] = poly
    return poly


# ---------------------------------------------------------------------------
# the extension relation

def _with_isolated_label(f, new_label):
    labels = dict(f.labels)
    labels[new_label] = f.n
    return LabelledGraph(f.n + 1, f.edges, labels)


def _relabel_vertex_and_strip(f, u, new_label):
    """Label unlabelled vertex u with new_label, dropping its edges to the
    labelled vertices (they are accounted for separately)."""
    labelled = set(f.labels.values())
    edges = [(a, b) for a, b in f.edges
             if not ((a == u and b in labelled) or (b == u and a in labelled))]
    labels = dict(f.labels)
    labels[new_label] = u
    return LabelledGraph(f.n, edges, labels)


def _extension_equation(f_pat, tau_prime, new_label):
    """For one base pattern F, the pieces of the relation
    count(F at w) = count(F~ at (w,v)) + sum_u c_u * reduction(F_u)(freqs at (w,v))
    where F~ adds an isolated root and F_u promotes vertex u to the new root.
    Returns (F~, [(c_u, delta polynomial of F_u)])."""
    ftilde = _with_isolated_label(f_pat, new_label)
    star_block = tau_prime.block_of(new_label)
    corrections = []
    for u in f_pat.unlabelled_vertices:
        ok = True
        for lab, lv in f_pat.labels.items():
            if f_pat.adjacent(u, lv):
                if not tau_prime.blocks_adjacent(star_block, tau_prime.block_of(lab)):
                    ok = False
                    break
        if ok:
            fu = _relabel_vertex_and_strip(f_pat, u, new_label)
            corrections.append(delta_polynomial(fu))
    return ftilde, corrections


def extends(tau_prime, f_prime, tau, f):
    """Whether (tau', f') is an admissible one-root extension of (tau, f).

    Checks the type restriction plus, for every base pattern with at most
    b unlabelled vertices (b = bound of f'), the defining linear relation:
    the new root either coincides with an old root (counts transfer
    directly) or is fresh (counts split into homomorphisms avoiding the new
    root and homomorphisms passing through it).
    """
    if f_prime.q != f.q:
        raise GraphError("mismatched moduli")
    q = f.q
    if not tau_prime.extends(tau):
        return False
    new = [lab for lab in tau_prime.labels if lab not in tau.labels]
    if len(new) != 1:
        raise GraphError("extension must add exactly one label")
    new_label = new[0]
    b = f_prime.bound
    if f.bound is not None and b is not None and f.bound < b:
        raise GraphError("base vector bound must be at least the extension bound")
    merged = tau_prime.is_merged(new_label)
    for f_pat in enumerate_label_connected(tau.labels, b):
        ftilde = _with_isolated_label(f_pat, new_label)
        lhs = f.value(f_pat)
        rhs = f_prime.value(ftilde)
        if not merged:
            _, corrections = _extension_equation(f_pat, tau_prime, new_label)
            for poly in corrections:
                rhs = (rhs + poly.evaluate_mod(f_prime.getter(), q)) % q
        if lhs % q != rhs % q:
            return False
    return True


class InconsistentExtension(GraphError):
    pass


def _merge_new_label_into(f_pat, new_label, target_label):
    """Identify the new root's vertex with the target root's vertex, moving
    its edges over and dropping duplicates; result is over the old labels."""
    u = f_pat.labels[new_label]
    t = f_pat.labels[target_label]
    edges = set()
    for a, b in f_pat.edges:
        a2 = t if a == u else a
        b2 = t if b == u else b
        assert a2 != b2, "labelled vertices are independent"
        edges.add((a2, b2) if a2 < b2 else (b2, a2))
    keep = [v for v in range(f_pat.n) if v != u]
    pos = {v: i for i, v in enumerate(keep)}
    labels = {lab: pos[v] for lab, v in f_pat.labels.items() if lab != new_label}
    edges = {(pos[a], pos[b]) if pos[a] < pos[b] else (pos[b], pos[a]) for a, b in edges}
    return LabelledGraph(len(keep), edges, labels)


def complete_extension(tau_prime, tau, f, dependent_coords, b):
    """The unique extension vector consistent with the given data.

    For a fresh new root, ``dependent_coords`` must assign a residue to every
    pattern dependent on the new label; the remaining coordinates are filled
    by the defining relations in order of unlabelled size.  For a merged new
    root no dependent data is allowed and the single candidate is built by
    rerouting the new root's edges.  Raises InconsistentExtension when the
    filled vector violates a divisibility or quotient-equality constraint.
    """
    q = f.q
    new = [lab for lab in tau_prime.labels if lab not in tau.labels]
    if len(new) != 1:
        raise GraphError("extension must add exactly one label")
    new_label = new[0]
    pats = enumerate_label_connected(tau_prime.labels, b)
    coords = {}
    patterns = {code: pat for pat in pats for code in [canonical_form(pat)]}

    if tau_prime.is_merged(new_label):
        if dependent_coords:
            raise GraphError("a merged root admits no free dependent coordinates")
        target = next(lab for lab in tau_prime.block_of(new_label) if lab != new_label)
        for pat in pats:
            base = _merge_new_label_into(pat, new_label, target)
            coords[canonical_form(pat)] = f.value(base) % q
    else:
        dep = {}
        for key, val in dependent_coords.items():
            code = key if isinstance(key, bytes) else canonical_form(key)
            dep[code] = val % q
        for pat in pats:
            code = canonical_form(pat)
            if pat.dependent_on(new_label):
                if code not in dep:
                    raise GraphError("missing dependent coordinate")
                coords[code] = dep[code]
        fv_partial = FreqVector(q, tau_prime.labels, b, coords, patterns)
        for size in range(1, b + 1):
            for f_pat in enumerate_label_connected(tau.labels, size):
                if len(f_pat.unlabelled_vertices) != size:
                    continue
                ftilde, corrections = _extension_equation(f_pat, tau_prime, new_label)
                val = f.value(f_pat) % q
                for poly in corrections:
                    val = (val - poly.evaluate_mod(fv_partial.getter(), q)) % q
                coords[canonical_form(ftilde)] = val

    out = FreqVector(q, tau_prime.labels, b, coords, patterns)
    _check_feasible(out, tau_prime, q)
    return out


def _check_feasible(fv, tau, q):
    by_class = {}
    for code, pat in fv.patterns.items():
        if code not in fv.coords:
            continue
        quo = quotient(pat, tau.partition)
        qcode = canonical_form(quo)
        by_class.setdefault(qcode, []).append((code, quo))
    for qcode, members in by_class.items():
        vals = {fv.coords[c] for c, _ in members}
        if len(vals) != 1:
            raise InconsistentExtension("quotient-equal coordinates disagree")
        val = vals.pop()
        if aut_of(members[0][1]) % q == 0 and val != 0:
            raise InconsistentExtension("coordinate violates divisibility by its automorphism count")


# ---------------------------------------------------------------------------
# extension counting

_LAMBDA_MEMO = {}


def _indicator_expansion(labels_prime, f_prime_items, q, b):
    """Formal-sum expansion of the product over all base patterns F of
    1 - (count(F) - r_F)^(q-1), with r_F the target residues."""
    one = FormalSum([(all_labelled_pattern(labels_prime), 1)])
    total = one
    for pat, r in f_prime_items:
        powers = [one]
        for _ in range(q - 1):
            powers.append(_sum_product(powers[-1], FormalSum([(pat, 1)])))
        # 1 - (count - r)^(q-1) = 1 - sum_j C(q-1,j) count^j (-r)^(q-1-j)
        factor = one
        for j in range(q):
            coeff = -comb(q - 1, j) * (-r) ** (q - 1 - j)
            factor = factor.plus(powers[j].scaled(coeff))
        total = _sum_product(total, factor)
    return total


def _unlabel_and_connect(pat, new_label, attach_labels):
    """Drop the new root's label after wiring it to the given old roots; the
    freed vertex becomes an ordinary unlabelled vertex."""
    u = pat.labels[new_label]
    edges = set(pat.edges)
    for lab in attach_labels:
        t = pat.labels[lab]
        edges.add((u, t) if u < t else (t, u))
    labels = {lab: v for lab, v in pat.labels.items() if lab != new_label}
    return LabelledGraph(pat.n, edges, labels)


def lambda_polynomial(tau_prime, f_prime, tau_labels, q, b):
    """Reduction polynomial whose value at the frequency vector of w is the
    number mod q of vertices v realizing (tau', f') — fresh-root case."""
    labels_prime = tau_prime.labels
    new_label = next(lab for lab in labels_prime if lab not in tau_labels)
    star_block = tau_prime.block_of(new_label)
    adj_labels = frozenset(
        lab for lab in tau_labels
        if tau_prime.blocks_adjacent(star_block, tau_prime.block_of(lab)))
    f_prime_items = tuple(sorted(
        ((canonical_form(pat), pat, f_prime.value(pat)) for pat in
         enumerate_label_connected(labels_prime, b)),
        key=lambda t: t[0])) if b >= 1 else ()
    memo_key = (adj_labels, tuple((c, r) for c, _, r in f_prime_items),
                tuple(tau_labels), q, b)
    if memo_key in _LAMBDA_MEMO:
        return _LAMBDA_MEMO[memo_key]

    indicator = _indicator_expansion(
        labels_prime, [(pat, r) for _, pat, r in f_prime_items], q, b)
    poly = FreqPolynomial()
    others = [lab for lab in tau_labels if lab not in adj_labels]
    for extra in itertools.chain.from_iterable(
            itertools.combinations(others, r) for r in range(len(others) + 1)):
        s_labels = tuple(adj_labels) + extra
        sign = (-1) ** len(extra)
        for pat, c in indicator.items():
            reduced = _unlabel_and_connect(pat, new_label, s_labels)
            poly = poly.plus(delta_polynomial(reduced).scaled(sign * c))
    _LAMBDA_MEMO[memo_key] = poly
    return poly


def lambda_count(tau_prime, f_prime, tau, f, *, override=False):
    """Number mod q of vertices v with type(w, v) = tau' and extension
    frequency vector f', as a function of (tau, freq at w) alone.

    Requires q prime.  The fresh-root case expands the indicator product
    symbolically and reduces it through delta polynomials, so the base
    vector must cover patterns with up to (q-1) * b * #patterns + 1
    unlabelled vertices; graph-backed vectors always do, explicit vectors
    must be built with a sufficient bound (or override=True to try anyway).
    """
    q = f.q
    if not _is_prime(q):
        raise GraphError("extension counting requires a prime modulus")
    if f_prime.q != q:
        raise GraphError("mismatched moduli")
    if not tau_prime.extends(tau):
        return 0
    new = [lab for lab in tau_prime.labels if lab not in tau.labels]
    if len(new) != 1:
        raise GraphError("extension must add exactly one label")
    new_label = new[0]
    b = f_prime.bound or 0

    if tau_prime.is_merged(new_label):
        target = next(lab for lab in tau_prime.block_of(new_label) if lab != new_label)
        for pat in enumerate_label_connected(tau_prime.labels, b):
            base = _merge_new_label_into(pat, new_label, target)
            if f_prime.value(pat) % q != f.value(base) % q:
                return 0
        return 1 % q

    if b >= 1:
        needed = (q - 1) * b * len(enumerate_label_connected(tau_prime.labels, b)) + 1
    else:
        needed = 1
    if f.bound is not None and f.bound < needed and not override:
        raise GraphError(
            f"base vector bound {f.bound} is below the required {needed}; "
            "pass override=True to attempt evaluation anyway")
    poly = lambda_polynomial(tau_prime, f_prime, tau.labels, q, b)
    return poly.evaluate_mod(f.getter(), q)
