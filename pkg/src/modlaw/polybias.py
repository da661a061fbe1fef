"""Polynomials over Z_q, biased-measure bias, and measure-twisted Gowers norms.

bias_exact enumerates the p-biased hypercube (vectorised, exact rational
accumulation per residue class of the exponent), so dyadic answers such as
the 2^-r decay of generalized-inner-product polynomials come out exactly.
Exact-mode Gowers norms accumulate one rational coefficient per power of the
root of unity and take absolute values only at the end; the root of unity is
fixed to exp(2*pi*i/q), which leaves every reported magnitude independent of
that choice.

Monte Carlo estimators derive per-chunk Philox streams from (seed, chunk),
so results are reproducible and independent of scheduling.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction

import numpy as np

from .counting import _is_prime


class BiasScaleError(ValueError):
    pass


class ZqPolynomial:
    """Sparse polynomial over Z_q with multilinear monomials in m variables.

    Arithmetic (plus/times) merges monomials multilinearly, which is exact on
    0/1-valued inputs; evaluate() is literal substitution and is valid at
    arbitrary points of Z_q^m.
    """

    __slots__ = ("q", "m", "terms")

    def __init__(self, q, m, terms=None):
        if q < 2:
            raise ValueError("modulus must be at least 2")
        self.q = q
        self.m = m
        self.terms = {}
        for mono, coeff in (terms or {}).items():
            self.add_term(frozenset(mono), coeff)

    @classmethod
    def constant(cls, q, m, c):
        return cls(q, m, {frozenset(): c})

    @classmethod
    def from_monomials(cls, q, m, monomials):
        """monomials: iterable of (variable-index tuple, coefficient)."""
        p = cls(q, m)
        for vs, c in monomials:
            p.add_term(frozenset(vs), c)
        return p

    def add_term(self, mono, coeff):
        mono = frozenset(mono)
        for v in mono:
            if not 0 <= v < self.m:
                raise ValueError(f"variable {v} out of range")
        c = (self.terms.get(mono, 0) + coeff) % self.q
        if c:
            self.terms[mono] = c
        else:
            self.terms.pop(mono, None)

    @property
    def degree(self):
        return max((len(mono) for mono in self.terms), default=0)

    def plus(self, other):
        out = ZqPolynomial(self.q, self.m, self.terms)
        for mono, c in other.terms.items():
            out.add_term(mono, c)
        return out

    def scaled(self, k):
        return ZqPolynomial(self.q, self.m,
                            {mono: c * k % self.q for mono, c in self.terms.items()})

    def times(self, other, term_cap=None):
        out = ZqPolynomial(self.q, self.m)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out.add_term(m1 | m2, c1 * c2)
                if term_cap is not None and len(out.terms) > term_cap:
                    raise BiasScaleError("polynomial term count exceeded")
        return out

    def evaluate(self, point):
        total = 0
        for mono, c in self.terms.items():
            prod = c
            for v in mono:
                prod = prod * point[v] % self.q
                if prod == 0:
                    break
            total += prod
        return total % self.q

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda s: (len(s), sorted(s))):
            c = self.terms[mono]
            body = "*".join(f"Z{v+1}" for v in sorted(mono))
            parts.append(f"{c}" if not body else (body if c == 1 else f"{c}*{body}"))
        return " + ".join(parts)


def gip(r, d, coeffs=None, q=2):
    """Generalized inner product: disjoint blocks of d variables, one degree-d
    monomial per block, all coefficients nonzero."""
    if coeffs is None:
        coeffs = [1] * r
    if len(coeffs) != r:
        raise ValueError("need one coefficient per block")
    if any(c % q == 0 for c in coeffs):
        raise ValueError("generalized inner product requires nonzero coefficients")
    p = ZqPolynomial(q, r * d)
    for j in range(r):
        p.add_term(frozenset(range(j * d, (j + 1) * d)), coeffs[j])
    return p


# ---------------------------------------------------------------------------
# bias under the p-biased measure on {0,1}^m

def _as_fraction(p):
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    return Fraction(*float(p).as_integer_ratio())


def _residue_popcount_table(Q, chunk=1 << 16):
    """counts[v][k] = #{x in {0,1}^m : Q(x) = v, popcount(x) = k}."""
    m, q = Q.m, Q.q
    counts = np.zeros((q, m + 1), dtype=np.int64)
    monos = [(np.array(sorted(mono), dtype=np.int64), c) for mono, c in Q.terms.items()]
    const = sum(c for mono, c in Q.terms.items() if not mono) % q
    total = 1 << m
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        bits = (idx[:, None] >> np.arange(m, dtype=np.uint64)) & 1
        bits = bits.astype(np.int64)
        vals = np.full(len(idx), const, dtype=np.int64)
        for vs, c in monos:
            if len(vs) == 0:
                continue
            vals += c * bits[:, vs].prod(axis=1)
        vals %= q
        pops = bits.sum(axis=1)
        np.add.at(counts, (vals, pops), 1)
    return counts


def _phase_weights(counts, p, q):
    """Exact per-residue total weight under the p-biased product measure."""
    p = _as_fraction(p)
    m = counts.shape[1] - 1
    weights = [Fraction(0)] * q
    for k in range(m + 1):
        wk = p ** k * (1 - p) ** (m - k)
        for v in range(q):
            c = int(counts[v, k])
            if c:
                weights[v] += c * wk
    return weights


def _magnitude(weights, q):
    if q == 2:
        return abs(weights[0] - weights[1])
    z = sum(complex(w) * cmath.exp(2j * cmath.pi * v / q) for v, w in enumerate(weights))
    return abs(z)


def bias_exact(Q, p):
    """|E[omega^Q(z)]| for z drawn from the p-biased measure on {0,1}^m.

    Exact enumeration; the q = 2 value is an exact rational (returned also
    by bias_exact_fraction), larger moduli take one float root-of-unity
    combination over q exact residue weights.
    """
    if Q.m > 24:
        raise BiasScaleError(
            f"exact bias enumerates 2^{Q.m} points; use bias_mc for m > 24")
    weights = _phase_weights(_residue_popcount_table(Q), p, Q.q)
    mag = _magnitude(weights, Q.q)
    return float(mag) if isinstance(mag, Fraction) else mag


def bias_exact_fraction(Q, p):
    """Exact signed expectation of (-1)^Q under the p-biased measure (q = 2)."""
    if Q.q != 2:
        raise ValueError("exact rational bias is available for modulus 2")
    if Q.m > 24:
        raise BiasScaleError("exact bias enumerates 2^m points; m too large")
    weights = _phase_weights(_residue_popcount_table(Q), p, 2)
    return weights[0] - weights[1]


class BiasEstimate:
    __slots__ = ("value", "stderr", "samples")

    def __init__(self, value, stderr, samples):
        self.value = value
        self.stderr = stderr
        self.samples = samples

    def __repr__(self):
        return f"BiasEstimate(value={self.value:.6f}, stderr={self.stderr:.6f})"


def bias_mc(Q, p, samples, seed):
    """Monte Carlo estimate of |E[omega^Q]| with standard error 1/sqrt(samples)."""
    if samples < 1:
        raise ValueError("need at least one sample")
    q, m = Q.q, Q.m
    p = float(p)
    acc = 0j
    done = 0
    chunk_id = 0
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    monos = [(np.array(sorted(mono), dtype=np.int64), c) for mono, c in Q.terms.items()]
    const = sum(c for mono, c in Q.terms.items() if not mono) % q
    while done < samples:
        take = min(65536, samples - done)
        rng = np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), chunk_id]))
        bits = (rng.random((take, m)) < p).astype(np.int64)
        vals = np.full(take, const, dtype=np.int64)
        for vs, c in monos:
            if len(vs):
                vals += c * bits[:, vs].prod(axis=1)
        acc += roots[vals % q].sum()
        done += take
        chunk_id += 1
    return BiasEstimate(abs(acc) / samples, 1.0 / math.sqrt(samples), samples)


# ---------------------------------------------------------------------------
# measures on Z_q^m and their derived direction distributions

class Measure:
    """Exact probability table on Z_q^m (points are tuples of residues)."""

    __slots__ = ("q", "m", "probs")

    def __init__(self, q, m, probs):
        self.q = q
        self.m = m
        self.probs = {}
        total = Fraction(0)
        for pt, mass in probs.items():
            pt = tuple(int(x) % q for x in pt)
            if len(pt) != m:
                raise ValueError("point arity mismatch")
            mass = _as_fraction(mass)
            if mass < 0:
                raise ValueError("negative mass")
            if mass:
                self.probs[pt] = self.probs.get(pt, Fraction(0)) + mass
                total += mass
        if total != 1:
            raise ValueError(f"measure must sum to 1, got {total}")

    @classmethod
    def uniform(cls, q, m):
        mass = Fraction(1, q ** m)
        return cls(q, m, {pt: mass for pt in itertools.product(range(q), repeat=m)})

    @classmethod
    def p_biased(cls, q, m, p):
        p = _as_fraction(p)
        probs = {}
        for pt in itertools.product((0, 1), repeat=m):
            k = sum(pt)
            probs[pt] = p ** k * (1 - p) ** (m - k)
        return cls(q, m, probs)

    def tensor(self, other):
        if other.q != self.q:
            raise ValueError("mismatched moduli")
        probs = {}
        for a, wa in self.probs.items():
            for b, wb in other.probs.items():
                probs[a + b] = wa * wb
        return Measure(self.q, self.m + other.m, probs)

    def support(self):
        return set(self.probs)

    def __repr__(self):
        return f"Measure(q={self.q}, m={self.m}, {len(self.probs)} atoms)"


def _add(q, a, b):
    return tuple((x + y) % q for x, y in zip(a, b))


def _sub(q, a, b):
    return tuple((x - y) % q for x, y in zip(a, b))


def _mu_power_table(mu, d):
    """dict (x, t_1..t_d) -> mass for the level-d direction distribution."""
    table = {(pt,): mass for pt, mass in mu.probs.items()}
    q = mu.q
    for level in range(1, d + 1):
        prefix_mass = {}
        for key, mass in table.items():
            prefix_mass[key[1:]] = prefix_mass.get(key[1:], Fraction(0)) + mass
        by_prefix = {}
        for key, mass in table.items():
            by_prefix.setdefault(key[1:], []).append((key[0], mass))
        new = {}
        for prefix, entries in by_prefix.items():
            denom = prefix_mass[prefix]
            if denom == 0:
                continue
            for x, m1 in entries:
                for y, m2 in entries:
                    t_new = _sub(q, y, x)
                    new_key = (x,) + prefix + (t_new,)
                    new[new_key] = new.get(new_key, Fraction(0)) + m1 * m2 / denom
        table = new
    return table


def mu_power(mu, d):
    """The level-d direction distribution as a measure on (Z_q^m)^(d+1)."""
    if d == 0:
        return mu
    if len(mu.probs) ** (d + 1) > 1 << 24:
        raise BiasScaleError("direction-distribution table too large; sample instead")
    table = _mu_power_table(mu, d)
    flat = {tuple(x for part in key for x in part): mass for key, mass in table.items()}
    return Measure(mu.q, mu.m * (d + 1), flat)


class PhaseFunction:
    """Unit-modulus function omega^Q on Z_q^m, stored through its exponent."""

    __slots__ = ("q", "m", "_exp")

    def __init__(self, q, m, exponent):
        self.q = q
        self.m = m
        self._exp = exponent

    @classmethod
    def from_polynomial(cls, Q):
        return cls(Q.q, Q.m, Q.evaluate)

    @classmethod
    def from_table(cls, q, m, table):
        table = {tuple(pt): int(v) % q for pt, v in table.items()}
        return cls(q, m, lambda pt: table[tuple(pt)])

    @classmethod
    def one(cls, q, m):
        return cls(q, m, lambda pt: 0)

    def exponent(self, pt):
        return self._exp(tuple(pt)) % self.q

    def value(self, pt):
        return cmath.exp(2j * cmath.pi * self.exponent(pt) / self.q)

    def tensor(self, other):
        if other.q != self.q:
            raise ValueError("mismatched moduli")
        m1 = self.m

        def exp(pt):
            return (self._exp(pt[:m1]) + other._exp(pt[m1:])) % self.q

        return PhaseFunction(self.q, self.m + other.m, exp)

    def times_phase(self, h):
        """Multiply by omega^h for a polynomial h (adds exponents)."""

        def exp(pt):
            return (self._exp(pt) + h.evaluate(pt)) % self.q

        return PhaseFunction(self.q, self.m, exp)


def _derivative_exponent(f, q, x, ts):
    """Exponent of the iterated multiplicative derivative at directions ts."""
    d = len(ts)
    total = 0
    for mask in range(1 << d):
        pt = x
        for i in range(d):
            if mask >> i & 1:
                pt = _add(q, pt, ts[i])
        e = f.exponent(pt)
        if bin(mask).count("1") % 2:
            total -= e
        else:
            total += e
    return total % q


class GowersResult:
    __slots__ = ("value", "mode", "stderr", "samples")

    def __init__(self, value, mode, stderr=None, samples=None):
        self.value = value
        self.mode = mode
        self.stderr = stderr
        self.samples = samples

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        extra = f", stderr={self.stderr:.2e}" if self.stderr is not None else ""
        return f"GowersResult({self.value:.10f}, {self.mode}{extra})"


def _phase_sum_abs(weights, q):
    """|sum_j w_j omega^j| with exact rational weights."""
    if q == 2:
        return float(abs(weights[0] - weights[1]))
    return abs(sum(complex(w) * cmath.exp(2j * cmath.pi * j / q)
                   for j, w in enumerate(weights)))


def gowers_norm(f, mu, d, samples=None, seed=0):
    """Measure-twisted uniformity norm of level d.

    Level 0 is |E_mu f|.  Exact mode accumulates one rational weight per
    residue of the derivative exponent over the level-d direction
    distribution; it is used whenever the distribution table stays below
    2^24 atoms.  Otherwise a Monte Carlo estimate over per-coordinate
    direction samples is returned (product measures only).
    """
    q = f.q
    if mu.q != q or mu.m != f.m:
        raise ValueError("phase function and measure must share one domain")
    if d == 0:
        weights = [Fraction(0)] * q
        for pt, mass in mu.probs.items():
            weights[f.exponent(pt)] += mass
        return GowersResult(_phase_sum_abs(weights, q), "exact")
    if len(mu.probs) ** (d + 1) <= 1 << 24:
        table = _mu_power_table(mu, d)
        weights = [Fraction(0)] * q
        for key, mass in table.items():
            x, ts = key[0], key[1:]
            weights[_derivative_exponent(f, q, x, ts)] += mass
        mag = _phase_sum_abs(weights, q)
        return GowersResult(mag ** (1.0 / (1 << d)), "exact")
    if samples is None:
        raise BiasScaleError(
            "direction distribution too large for exact mode; pass samples= for Monte Carlo")
    return _gowers_mc(f, mu, d, samples, seed)


def _gowers_mc(f, mu, d, samples, seed):
    # per-point sampling from the level-d table of the 1-dimensional factors;
    # valid because the level-d distribution of a product measure is the
    # product of the factors' level-d distributions.
    factors = []
    for i in range(mu.m):
        marg = {}
        for pt, mass in mu.probs.items():
            marg[(pt[i],)] = marg.get((pt[i],), Fraction(0)) + mass
        factors.append(Measure(mu.q, 1, marg))
    if _canonical_product_check(mu, factors):
        raise BiasScaleError(
            "Monte Carlo direction sampling requires a product measure")
    tables = [_mu_power_table(fac, d) for fac in factors]
    keys = [list(t) for t in tables]
    weights = [np.array([float(t[k]) for k in ks]) for t, ks in zip(tables, keys)]
    rng = np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), 0]))
    acc = 0j
    for _ in range(samples):
        x = []
        ts = [[] for _ in range(d)]
        for i in range(mu.m):
            pick = keys[i][rng.choice(len(keys[i]), p=weights[i] / weights[i].sum())]
            x.append(pick[0][0])
            for lvl in range(d):
                ts[lvl].append(pick[1 + lvl][0])
        e = _derivative_exponent(f, mu.q, tuple(x), [tuple(t) for t in ts])
        acc += cmath.exp(2j * cmath.pi * e / mu.q)
    mag = abs(acc) / samples
    return GowersResult(mag ** (1.0 / (1 << d)), "mc",
                        stderr=1.0 / math.sqrt(samples), samples=samples)


def _canonical_product_check(mu, factors):
    prod = factors[0]
    for fac in factors[1:]:
        prod = prod.tensor(fac)
    bad = [pt for pt in mu.probs if mu.probs[pt] != prod.probs.get(pt)]
    return bad
