"""FO[Mod_q] syntax, parser, and direct evaluation on concrete graphs.

Grammar (ASCII, whitespace-insensitive)::

    formula := "E(" var "," var ")" | var "=" var | "!" formula
             | "(" formula "&" formula ")" | "(" formula "|" formula ")"
             | "exists" var "." formula | "forall" var "." formula
             | "parity" var "." formula | "mod[" int "," int "]" var "." formula
    var     := [a-z][a-z0-9]*

"parity" is sugar for mod[2,1].  Counting quantifiers require a prime
modulus and a residue below it; violations are rejected at parse time with
distinct error codes.

evaluate() is the deliberately simple recursive oracle (cost O(n^t * |phi|)
for quantifier depth t); evaluate_tabulated() computes the same semantics
bottom-up on numpy truth tables and is what the Monte Carlo harness uses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .counting import _is_prime


class FormulaError(ValueError):
    code = "formula"


class FormulaSyntaxError(FormulaError):
    code = "syntax"

    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class NonPrimeModulusError(FormulaError):
    code = "nonprime-modulus"


class BadResidueError(FormulaError):
    code = "bad-residue"


@dataclass(frozen=True)
class Edge:
    left: str
    right: str


@dataclass(frozen=True)
class Equal:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sub: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    sub: "Formula"


@dataclass(frozen=True)
class ModQ:
    q: int
    i: int
    var: str
    sub: "Formula"

    def __post_init__(self):
        if not _is_prime(self.q):
            raise NonPrimeModulusError(f"modulus {self.q} is not prime")
        if not 0 <= self.i < self.q:
            raise BadResidueError(f"residue {self.i} is not in [0, {self.q})")


Formula = Edge | Equal | Not | And | Or | Exists | Forall | ModQ

_KEYWORDS = {"exists", "forall", "parity", "mod"}
_VAR_RE = re.compile(r"[a-z][a-z0-9]*")
_INT_RE = re.compile(r"\d+")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise FormulaSyntaxError(message, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, token):
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def peek(self, token):
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def word(self):
        self.skip_ws()
        m = _VAR_RE.match(self.text, self.pos)
        if not m:
            self.error("expected an identifier")
        self.pos = m.end()
        return m.group()

    def var(self):
        w = self.word()
        if w in _KEYWORDS:
            self.error(f"{w!r} is a reserved word")
        return w

    def integer(self):
        self.skip_ws()
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def formula(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch == "E" and self.text.startswith("E(", self.pos):
            self.pos += 2
            left = self.var()
            self.expect(",")
            right = self.var()
            self.expect(")")
            return Edge(left, right)
        if ch == "!":
            self.pos += 1
            return Not(self.formula())
        if ch == "(":
            self.pos += 1
            left = self.formula()
            self.skip_ws()
            if self.peek("&"):
                self.expect("&")
                node = And(left, self.formula())
            elif self.peek("|"):
                self.expect("|")
                node = Or(left, self.formula())
            else:
                self.error("expected '&' or '|'")
            self.expect(")")
            return node
        start = self.pos
        w = self.word()
        if w == "exists" or w == "forall":
            v = self.var()
            self.expect(".")
            sub = self.formula()
            return Exists(v, sub) if w == "exists" else Forall(v, sub)
        if w == "parity":
            v = self.var()
            self.expect(".")
            return ModQ(2, 1, v, self.formula())
        if w == "mod":
            self.expect("[")
            q = self.integer()
            self.expect(",")
            i = self.integer()
            self.expect("]")
            v = self.var()
            self.expect(".")
            return ModQ(q, i, v, self.formula())
        # must be an equality atom: var = var
        self.pos = start
        left = self.var()
        self.expect("=")
        right = self.var()
        return Equal(left, right)


def parse(text):
    """Parse concrete syntax into a Formula AST; errors carry the offset."""
    p = _Parser(text)
    node = p.formula()
    p.skip_ws()
    if p.pos != len(p.text):
        p.error("trailing input")
    return node


def to_text(phi):
    """Concrete syntax such that parse(to_text(phi)) == phi."""
    match phi:
        case Edge(a, b):
            return f"E({a},{b})"
        case Equal(a, b):
            return f"{a} = {b}"
        case Not(sub):
            return f"!{to_text(sub)}"
        case And(a, b):
            return f"({to_text(a)} & {to_text(b)})"
        case Or(a, b):
            return f"({to_text(a)} | {to_text(b)})"
        case Exists(v, sub):
            return f"exists {v}. {to_text(sub)}"
        case Forall(v, sub):
            return f"forall {v}. {to_text(sub)}"
        case ModQ(2, 1, v, sub):
            return f"parity {v}. {to_text(sub)}"
        case ModQ(q, i, v, sub):
            return f"mod[{q},{i}] {v}. {to_text(sub)}"
    raise FormulaError(f"not a formula node: {phi!r}")


def free_variables(phi):
    match phi:
        case Edge(a, b) | Equal(a, b):
            return {a, b}
        case Not(sub):
            return free_variables(sub)
        case And(a, b) | Or(a, b):
            return free_variables(a) | free_variables(b)
        case Exists(v, sub) | Forall(v, sub) | ModQ(_, _, v, sub):
            return free_variables(sub) - {v}
    raise FormulaError(f"not a formula node: {phi!r}")


def quantifier_depth(phi):
    match phi:
        case Edge() | Equal():
            return 0
        case Not(sub):
            return quantifier_depth(sub)
        case And(a, b) | Or(a, b):
            return max(quantifier_depth(a), quantifier_depth(b))
        case Exists(_, sub) | Forall(_, sub) | ModQ(_, _, _, sub):
            return 1 + quantifier_depth(sub)
    raise FormulaError(f"not a formula node: {phi!r}")


def moduli(phi):
    """The set of counting moduli appearing in the formula."""
    match phi:
        case Edge() | Equal():
            return set()
        case Not(sub) | Exists(_, sub) | Forall(_, sub):
            return moduli(sub)
        case And(a, b) | Or(a, b):
            return moduli(a) | moduli(b)
        case ModQ(q, _, _, sub):
            return {q} | moduli(sub)
    raise FormulaError(f"not a formula node: {phi!r}")


class UnboundVariableError(FormulaError):
    code = "unbound-variable"


def evaluate(phi, g, env=None):
    """Truth of the formula on a graph under an environment for the free
    variables; quantifiers range over all vertices."""
    env = dict(env or {})

    def look(v):
        if v not in env:
            raise UnboundVariableError(f"variable {v!r} is unbound")
        return env[v]

    match phi:
        case Edge(a, b):
            return g.adjacent(look(a), look(b))
        case Equal(a, b):
            return look(a) == look(b)
        case Not(sub):
            return not evaluate(sub, g, env)
        case And(a, b):
            return evaluate(a, g, env) and evaluate(b, g, env)
        case Or(a, b):
            return evaluate(a, g, env) or evaluate(b, g, env)
        case Exists(v, sub):
            return any(evaluate(sub, g, {**env, v: x}) for x in range(g.n))
        case Forall(v, sub):
            return all(evaluate(sub, g, {**env, v: x}) for x in range(g.n))
        case ModQ(q, i, v, sub):
            hits = sum(1 for x in range(g.n) if evaluate(sub, g, {**env, v: x}))
            return hits % q == i
    raise FormulaError(f"not a formula node: {phi!r}")


def _axis_of(ctx, var):
    for idx in range(len(ctx) - 1, -1, -1):
        if ctx[idx] == var:
            return idx
    raise UnboundVariableError(f"variable {var!r} is unbound")


def _atom_table(matrix, ctx, a, b):
    n = matrix.shape[0]
    ia, ib = _axis_of(ctx, a), _axis_of(ctx, b)
    shape = [1] * len(ctx)
    if ia == ib:
        vec = np.diagonal(matrix).copy()
        shape[ia] = n
        return np.broadcast_to(vec.reshape(shape), (n,) * len(ctx))
    lo, hi = min(ia, ib), max(ia, ib)
    src = matrix if (ia, ib) == (lo, hi) else matrix.T
    shape[lo] = n
    shape[hi] = n
    return np.broadcast_to(src.reshape(shape), (n,) * len(ctx))


def _tab(phi, adj, eq, ctx):
    n = adj.shape[0]
    match phi:
        case Edge(a, b):
            return _atom_table(adj, ctx, a, b)
        case Equal(a, b):
            return _atom_table(eq, ctx, a, b)
        case Not(sub):
            return ~_tab(sub, adj, eq, ctx)
        case And(a, b):
            return _tab(a, adj, eq, ctx) & _tab(b, adj, eq, ctx)
        case Or(a, b):
            return _tab(a, adj, eq, ctx) | _tab(b, adj, eq, ctx)
        case Exists(v, sub):
            return _tab(sub, adj, eq, ctx + (v,)).any(axis=-1)
        case Forall(v, sub):
            return _tab(sub, adj, eq, ctx + (v,)).all(axis=-1)
        case ModQ(q, i, v, sub):
            counts = _tab(sub, adj, eq, ctx + (v,)).sum(axis=-1)
            return counts % q == i
    raise FormulaError(f"not a formula node: {phi!r}")


def evaluate_tabulated(phi, adjacency, env=None):
    """Same semantics as evaluate(), computed bottom-up on truth tables over
    the free-variable context; adjacency is a boolean matrix."""
    adjacency = np.asarray(adjacency, dtype=bool)
    n = adjacency.shape[0]
    env = dict(env or {})
    ctx = tuple(sorted(free_variables(phi)))
    for v in ctx:
        if v not in env:
            raise UnboundVariableError(f"variable {v!r} is unbound")
    eq = np.eye(n, dtype=bool)
    table = _tab(phi, adjacency, eq, ctx)
    idx = tuple(env[v] for v in ctx)
    return bool(table[idx]) if ctx else bool(table)
