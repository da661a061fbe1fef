"""Quantifier elimination: formulas become predicates on frequency vectors.

For a formula with k free variables the construction produces a predicate on
(type of the root tuple, frequency vector at the root tuple) that agrees
with the formula on almost every dense random graph.  The recursion mirrors
the defining cases:

  * atoms read the type alone;
  * boolean connectives combine child predicates pointwise;
  * a counting quantifier sums, over all extended (type, vector) pairs the
    child accepts, the extension-count polynomial of that pair, and compares
    the total to the target residue;
  * an existential quantifier asks whether any admissible extension of the
    current (type, vector) is accepted by the child.  Extensions over a
    fresh root are parameterised by the residues at patterns dependent on
    the new label (one free residue per quotient class whose automorphism
    count is invertible mod q) and completed uniquely; a merged root has at
    most one candidate.  Universal quantifiers are rewritten as negated
    existentials.

Every predicate records which frequency coordinates it actually reads.
Because the coordinates of the feasible set at a sentence (k = 0) are
independent and uniform on their admissible residues, exact limiting
probabilities are obtained by enumerating assignments of the read
coordinates only; each limit is a rational with denominator a power of q.

Construction is single-threaded; built predicates may be evaluated
concurrently after construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import (
    GraphError,
    all_types,
    canonical_form,
    enumerate_connected,
    enumerate_label_connected,
    k1_pattern,
    make_type,
    type_of,
    types_extending,
)
from .counting import (
    FreqVector,
    aut_of,
    _is_prime,
    graph_backed_freq,
)
from .algebra import (
    InconsistentExtension,
    complete_extension,
    lambda_polynomial,
    _merge_new_label_into,
)
from .logic import (
    And,
    Edge,
    Equal,
    Exists,
    Forall,
    FormulaError,
    ModQ,
    Not,
    Or,
    free_variables,
    moduli,
    to_text,
)
from .polybias import ZqPolynomial


class ScaleExceededError(GraphError):
    def __init__(self, message, subformula=None):
        if subformula is not None:
            message = f"{message} (subformula: {to_text(subformula)})"
        super().__init__(message)
        self.subformula = subformula


# caps on the construction: residue-vector sums in the counting case and
# free-knob searches in the existential case
MOD_SUM_CAP = 200_000
EXISTS_ENUM_CAP = 65_536


class PsiFunction:
    """Predicate on (type, frequency vector) for one subformula.

    ``ctx`` is the variable context in binding order; label i corresponds to
    ctx[i-1].  ``bound`` is the frequency bound the predicate needs, and
    ``support`` the set of coordinate codes it can read.
    """

    def __init__(self, q, ctx, bound, support, support_patterns):
        self.q = q
        self.ctx = tuple(ctx)
        self.k = len(self.ctx)
        self.bound = bound
        self.support = frozenset(support)
        self.support_patterns = dict(support_patterns)

    @property
    def labels(self):
        return tuple(range(1, self.k + 1))

    def eval(self, tau, freq):
        raise NotImplementedError

    def eval_on_graph(self, g, w):
        tau = type_of(g, w, self.labels)
        freq = graph_backed_freq(g, tuple(w), self.q, self.labels, self.bound)
        return self.eval(tau, freq)

    def eval_on_adjacency(self, a_bool):
        """Sentence predicates only: evaluate on a boolean adjacency matrix,
        reading support coordinates through the closed-form counters."""
        if self.k != 0:
            raise GraphError("adjacency evaluation is for sentences")
        from .counting import inj_count_adjacency
        from .graphs import make_type as _mk
        n = a_bool.shape[0]
        coords = {}
        patterns = dict(self.support_patterns)
        k1 = k1_pattern(())
        k1c = canonical_form(k1)
        patterns.setdefault(k1c, k1)
        for code, pat in patterns.items():
            host = pat.as_host()
            coords[code] = (inj_count_adjacency(host, a_bool) % self.q
                            if host.n <= n else 0)
        coords[k1c] = n % self.q
        fv = FreqVector(self.q, (), max(self.bound, 1), coords, patterns)
        return self.eval(_mk((), (), ()), fv)


class _AtomicPsi(PsiFunction):
    def __init__(self, q, ctx, decide):
        super().__init__(q, ctx, 0, (), {})
        self._decide = decide

    def eval(self, tau, freq):
        return self._decide(tau)


class _NotPsi(PsiFunction):
    def __init__(self, child):
        super().__init__(child.q, child.ctx, child.bound, child.support,
                         child.support_patterns)
        self.child = child

    def eval(self, tau, freq):
        return 1 - self.child.eval(tau, freq)


class _BoolPsi(PsiFunction):
    def __init__(self, left, right, conj):
        bound = max(left.bound, right.bound)
        patterns = dict(left.support_patterns)
        patterns.update(right.support_patterns)
        super().__init__(left.q, left.ctx, bound,
                         left.support | right.support, patterns)
        self.left, self.right, self.conj = left, right, conj

    def eval(self, tau, freq):
        a = self.left.eval(tau, freq)
        b = self.right.eval(tau, freq)
        return a * b if self.conj else max(a, b)


class _ModPsi(PsiFunction):
    """Counting-quantifier case: the number of witnesses with any accepted
    extended profile is congruent to the residue at the accepted profile's
    extension-count polynomial, summed over accepted profiles."""

    def __init__(self, q, ctx, bound, target, entries, support, patterns):
        super().__init__(q, ctx, bound, support, patterns)
        self.target = target
        self.entries = entries  # (tau', kind, payload)

    def eval(self, tau, freq):
        total = 0
        getter = freq.value
        for tau_p, kind, payload in self.entries:
            if not tau_p.extends(tau):
                continue
            if kind == "poly":
                total += payload.evaluate_mod(getter, self.q)
            else:  # merged root: one candidate vertex, counted iff it matches
                if all(getter(base) % self.q == want for base, want in payload):
                    total += 1
        return int(total % self.q == self.target)


class _ExistsPsi(PsiFunction):
    def __init__(self, q, ctx, bound, child, knob_classes, conn_prime):
        base_pats = enumerate_label_connected(tuple(range(1, len(ctx) + 1)), bound) \
            if bound >= 1 else ()
        patterns = {canonical_form(p): p for p in base_pats}
        support = frozenset(patterns)
        super().__init__(q, ctx, bound, support, patterns)
        self.child = child
        self.knob_classes = knob_classes  # [(codes, rep_pattern, free?), ...]
        self.conn_prime = conn_prime

    def _candidates_fresh(self, tau_p, tau, freq):
        free = [cls for cls in self.knob_classes[tau_p] if cls["free"]]
        if self.q ** len(free) > EXISTS_ENUM_CAP:
            raise ScaleExceededError(
                f"existential search over {self.q}^{len(free)} dependent assignments")
        for assign in itertools.product(range(self.q), repeat=len(free)):
            dep = {}
            it_val = iter(assign)
            for cls in self.knob_classes[tau_p]:
                val = next(it_val) if cls["free"] else 0
                for code in cls["codes"]:
                    dep[code] = val
            try:
                yield complete_extension(tau_p, tau, freq, dep, self.bound)
            except InconsistentExtension:
                continue

    def _candidate_merged(self, tau_p, tau, freq):
        try:
            return complete_extension(tau_p, tau, freq, {}, self.bound)
        except InconsistentExtension:
            return None

    def eval(self, tau, freq):
        new_label = self.k + 1
        for tau_p in types_extending(tau, new_label):
            if tau_p.is_merged(new_label):
                cand = self._candidate_merged(tau_p, tau, freq)
                if cand is not None and self.child.eval(tau_p, cand):
                    return 1
            else:
                if tau_p not in self.knob_classes:
                    self.knob_classes[tau_p] = _dependent_classes(
                        tau_p, self.conn_prime, new_label, self.q)
                for cand in self._candidates_fresh(tau_p, tau, freq):
                    if self.child.eval(tau_p, cand):
                        return 1
        return 0


def _dependent_classes(tau_p, conn_prime, new_label, q):
    from .graphs import quotient
    classes = {}
    for pat in conn_prime:
        if not pat.dependent_on(new_label):
            continue
        qcode = canonical_form(quotient(pat, tau_p.partition))
        autq = aut_of(quotient(pat, tau_p.partition))
        classes.setdefault(qcode, {"codes": [], "free": autq % q != 0})
        classes[qcode]["codes"].append(canonical_form(pat))
    return [classes[qc] for qc in sorted(classes)]


def _decider_for_atom(phi, ctx):
    pos = {}
    for idx in range(len(ctx)):
        pos[ctx[idx]] = idx + 1  # innermost binding wins

    def label_of(var):
        if var not in pos:
            raise FormulaError(f"variable {var!r} is unbound")
        return pos[var]

    if isinstance(phi, Equal):
        a, b = label_of(phi.left), label_of(phi.right)
        return lambda tau: int(tau.block_of(a) == tau.block_of(b))
    a, b = label_of(phi.left), label_of(phi.right)

    def decide(tau):
        ba, bb = tau.block_of(a), tau.block_of(b)
        return int(ba != bb and tau.blocks_adjacent(ba, bb))

    return decide


def _build(phi, q, ctx, c_cap):
    if isinstance(phi, (Edge, Equal)):
        return _AtomicPsi(q, ctx, _decider_for_atom(phi, ctx))
    if isinstance(phi, Not):
        return _NotPsi(_build(phi.sub, q, ctx, c_cap))
    if isinstance(phi, (And, Or)):
        left = _build(phi.left, q, ctx, c_cap)
        right = _build(phi.right, q, ctx, c_cap)
        return _BoolPsi(left, right, isinstance(phi, And))
    if isinstance(phi, Forall):
        return _NotPsi(_build(Exists(phi.var, Not(phi.sub)), q, ctx, c_cap))
    if isinstance(phi, Exists):
        child = _build(phi.sub, q, ctx + (phi.var,), c_cap)
        k = len(ctx)
        b = max(child.bound, 1)
        if k + 1 + b > 7:
            raise ScaleExceededError(
                f"existential case needs patterns over {k + 1} labels with "
                f"bound {b}", phi)
        conn_prime = enumerate_label_connected(tuple(range(1, k + 2)), b)
        return _ExistsPsi(q, ctx, b, child, {}, conn_prime)
    if isinstance(phi, ModQ):
        if phi.q != q:
            raise FormulaError(
                f"quantifier modulus {phi.q} differs from the elimination modulus {q}")
        child = _build(phi.sub, q, ctx + (phi.var,), c_cap)
        return _build_mod(phi, child, q, ctx, c_cap)
    raise FormulaError(f"not a formula node: {phi!r}")


def _build_mod(phi, child, q, ctx, c_cap):
    k = len(ctx)
    b = child.bound
    new_label = k + 1
    if b >= 1:
        if k + 1 + b > 7:
            raise ScaleExceededError(
                f"counting case needs patterns over {k + 1} labels with bound {b}", phi)
        conn_prime = enumerate_label_connected(tuple(range(1, k + 2)), b)
        if len(conn_prime) * (q - 1) > 60 or q ** len(conn_prime) > MOD_SUM_CAP:
            raise ScaleExceededError(
                f"counting case sums over {q}^{len(conn_prime)} extension vectors", phi)
        a_bound = (q - 1) * b * len(conn_prime) + 1
    else:
        conn_prime = ()
        a_bound = 1
    if a_bound > c_cap:
        raise ScaleExceededError(
            f"counting case needs frequency bound {a_bound} > cap {c_cap}", phi)

    labels_prime = tuple(range(1, k + 2))
    prime_codes = [canonical_form(p) for p in conn_prime]
    prime_patterns = {canonical_form(p): p for p in conn_prime}
    entries = []
    support = set()
    patterns = {}
    for tau_p in all_types(labels_prime):
        merged = tau_p.is_merged(new_label)
        for residues in itertools.product(range(q), repeat=len(conn_prime)):
            fp = FreqVector(q, labels_prime, b,
                            dict(zip(prime_codes, residues)), prime_patterns)
            if not child.eval(tau_p, fp):
                continue
            if merged:
                target = next(l for l in tau_p.block_of(new_label) if l != new_label)
                payload = []
                for pat in conn_prime:
                    base = _merge_new_label_into(pat, new_label, target)
                    payload.append((base, fp.value(pat)))
                    code = canonical_form(base)
                    support.add(code)
                    patterns[code] = base
                entries.append((tau_p, "merged", tuple(payload)))
            else:
                poly = lambda_polynomial(tau_p, fp, tuple(range(1, k + 1)), q, b)
                entries.append((tau_p, "poly", poly))
                support |= poly.support
                patterns.update(poly.variables)
    return _ModPsi(q, ctx, a_bound, phi.i, entries, support, patterns)


def build_psi(phi, q, c_cap=7):
    """Build the (type, frequency) predicate for a formula.

    The formula may use only the counting modulus q (plain FO connectives
    and quantifiers are always allowed).  ``c_cap`` bounds the frequency
    bound any subformula may demand; construction fails loudly beyond it.
    """
    if not _is_prime(q):
        raise FormulaError(f"modulus {q} must be prime")
    used = moduli(phi)
    if used - {q}:
        raise FormulaError(
            f"formula mixes moduli {sorted(used)}; elimination handles a single prime")
    ctx = tuple(sorted(free_variables(phi)))
    psi = _build(phi, q, ctx, c_cap)
    if psi.bound > c_cap:
        raise ScaleExceededError(f"required frequency bound {psi.bound} exceeds cap {c_cap}")
    return psi


# ---------------------------------------------------------------------------
# limiting probabilities

@dataclass
class LimitProfile:
    q: int
    values: list  # exact Fractions, indexed by n mod q
    c_used: int
    feasible_set_sizes: list
    support_size: int

    def as_strings(self):
        return [f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
                for v in self.values]

    def to_json_dict(self):
        return {
            "q": self.q,
            "a": self.as_strings(),
            "a_float": [float(v) for v in self.values],
            "c_used": self.c_used,
            "feasible_set_sizes": [str(s) for s in self.feasible_set_sizes],
        }


def limit_probabilities(phi, q, c_cap=7):
    """Exact limiting satisfaction probabilities along residue classes of n.

    The sentence's predicate reads finitely many frequency coordinates; on
    the feasible set those coordinates are independent and uniform over
    their admissible residues (full Z_q when the pattern's automorphism
    count is invertible mod q, else {0}), with the single-vertex coordinate
    pinned to n mod q.  Averaging the predicate over that product measure
    gives each limit exactly, as a rational with denominator a power of q.
    """
    if free_variables(phi):
        raise FormulaError("limiting probabilities are defined for sentences only")
    psi = build_psi(phi, q, c_cap)
    c = max(psi.bound, 1)
    k1 = k1_pattern(())
    k1_code = canonical_form(k1)
    supp = dict(psi.support_patterns)
    supp[k1_code] = k1
    free_codes = sorted(code for code, pat in supp.items()
                        if code != k1_code and aut_of(pat) % q != 0)
    pinned_codes = [code for code in supp
                    if code != k1_code and code not in free_codes]

    conn = enumerate_connected(c)
    total_free = sum(1 for f in conn if canonical_form(f) != k1_code
                     and aut_of(f) % q != 0)
    feasible_size = q ** total_free

    tau0 = make_type((), (), ())
    values = []
    for residue in range(q):
        hits = 0
        for assign in itertools.product(range(q), repeat=len(free_codes)):
            coords = {k1_code: residue}
            coords.update(dict(zip(free_codes, assign)))
            for code in pinned_codes:
                coords[code] = 0
            fv = FreqVector(q, (), c, coords, supp)
            hits += psi.eval(tau0, fv)
        values.append(Fraction(hits, q ** len(free_codes)))
    return LimitProfile(q, values, c, [feasible_size] * q, len(supp))


# ---------------------------------------------------------------------------
# compilation to a polynomial in edge variables

class PolynomialScaleError(GraphError):
    pass


def _pattern_count_polynomial(pat, n, q, edge_index, term_cap):
    """The injective count of an unlabelled pattern on n-vertex hosts as a
    polynomial in the edge indicator variables."""
    poly = ZqPolynomial(q, len(edge_index))
    host_pairs = list(itertools.permutations(range(n), pat.n))
    for img in host_pairs:
        mono = frozenset(edge_index[tuple(sorted((img[u], img[v])))]
                         for u, v in pat.edges)
        poly.add_term(mono, 1)
        if len(poly.terms) > term_cap:
            raise PolynomialScaleError("edge-polynomial term count exceeded")
    return poly


def formula_to_polynomial(phi, q, n, c_cap=7, term_cap=1_000_000):
    """A polynomial P in the C(n,2) edge variables with P(adjacency) = 1
    exactly when the sentence's frequency predicate accepts the graph.

    The predicate's read coordinates are interpolated: for every accepted
    assignment of residues, the indicator of "each pattern count has that
    residue" expands as a product of 1 - (count_polynomial - residue)^(q-1).
    """
    if free_variables(phi):
        raise FormulaError("polynomial compilation is defined for sentences only")
    psi = build_psi(phi, q, c_cap)
    pairs = list(itertools.combinations(range(n), 2))
    edge_index = {e: i for i, e in enumerate(pairs)}

    k1 = k1_pattern(())
    k1_code = canonical_form(k1)
    supp = dict(psi.support_patterns)
    supp[k1_code] = k1
    codes = sorted(supp)
    count_polys = {}
    for code in codes:
        pat = supp[code]
        host = pat.as_host() if hasattr(pat, "as_host") else pat
        if host.n > n:
            count_polys[code] = ZqPolynomial(q, len(pairs))
        else:
            count_polys[code] = _pattern_count_polynomial(host, n, q, edge_index, term_cap)

    tau0 = make_type((), (), ())
    free_codes = [c for c in codes if c != k1_code and aut_of(supp[c]) % q != 0]
    pinned_codes = [c for c in codes if c != k1_code and c not in free_codes]
    result = ZqPolynomial(q, len(pairs))
    for assign in itertools.product(range(q), repeat=len(free_codes)):
        coords = {k1_code: n % q}
        coords.update(dict(zip(free_codes, assign)))
        for code in pinned_codes:
            coords[code] = 0
        fv = FreqVector(q, (), max(psi.bound, 1), coords, supp)
        if not psi.eval(tau0, fv):
            continue
        indicator = ZqPolynomial.constant(q, len(pairs), 1)
        for code in codes:
            diff = count_polys[code].plus(
                ZqPolynomial.constant(q, len(pairs), -coords[code]))
            power = ZqPolynomial.constant(q, len(pairs), 1)
            for _ in range(q - 1):
                power = power.times(diff, term_cap=term_cap)
            indicator = indicator.times(
                ZqPolynomial.constant(q, len(pairs), 1).plus(power.scaled(-1)),
                term_cap=term_cap)
        result = result.plus(indicator)
        if len(result.terms) > term_cap:
            raise PolynomialScaleError("edge-polynomial term count exceeded")
    return result
