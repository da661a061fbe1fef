"""Command-line interface.

Subcommands: eval, limit, freq, equidist, freqdist, labelled, gowers, bias,
convergence.  Every subcommand prints a JSON report (also written to
--json-out when given).  Exit codes: 0 success / gate passed, 2 gate failed,
1 usage or scale error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .graphs import (
    GraphError,
    canonical_form,
    graph_from_json,
    pattern,
    rooted_edge,
    type_of,
)
from .counting import freq_vector
from .logic import FormulaError, parse as parse_formula
from .elimination import limit_probabilities, build_psi
from .polybias import (
    BiasScaleError,
    Measure,
    PhaseFunction,
    ZqPolynomial,
    bias_exact,
    bias_mc,
    gip,
    gowers_norm,
)
from . import experiments


def _emit(args, payload):
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")


def _read_graph(path):
    with open(path) as fh:
        return graph_from_json(fh.read())


def _parse_exponent(text, q, m):
    """Tiny exponent-polynomial syntax: terms like '2*Z1*Z3 + Z2' (1-based)."""
    poly = ZqPolynomial(q, m)
    for raw in text.replace("-", "+-").split("+"):
        term = raw.strip()
        if not term:
            continue
        coeff = 1
        vs = []
        for factor in term.split("*"):
            factor = factor.strip()
            if factor.lower().startswith("z"):
                vs.append(int(factor[1:]) - 1)
            elif factor == "-":
                coeff = -coeff
            else:
                coeff *= int(factor)
        poly.add_term(frozenset(vs), coeff)
    return poly


def _pattern_list(spec):
    return [pattern(name.strip()) for name in spec.split(",") if name.strip()]


def cmd_eval(args):
    g = _read_graph(args.graph)
    phi = parse_formula(args.formula)
    env = {}
    if args.env:
        for item in args.env.split(","):
            var, val = item.split("=")
            env[var.strip()] = int(val)
    from .logic import evaluate
    value = evaluate(phi, g, env)
    _emit(args, {"formula": args.formula, "n": g.n, "value": bool(value)})
    return 0


def cmd_limit(args):
    phi = parse_formula(args.formula)
    profile = limit_probabilities(phi, args.q, c_cap=args.c_cap)
    _emit(args, profile.to_json_dict())
    return 0


def cmd_freq(args):
    g = _read_graph(args.graph)
    roots = tuple(int(x) for x in args.roots.split(",")) if args.roots else ()
    fv = freq_vector(g, roots, args.a, args.q)
    payload = fv.to_json_dict()
    payload["n"] = g.n
    payload["roots"] = list(roots)
    _emit(args, payload)
    return 0


def _gate_exit(report):
    return 0 if report.passed else 2


def cmd_equidist(args):
    pats = _pattern_list(args.patterns)
    report = experiments.equidist_copies(
        pats, args.n, args.p, args.q, args.samples, args.seed,
        threshold=args.threshold, workers=args.workers)
    _emit(args, report.to_json_dict())
    return _gate_exit(report)


def cmd_freqdist(args):
    report = experiments.freq_distribution(
        args.n, args.p, args.q, args.a, args.samples, args.seed,
        threshold=args.threshold, workers=args.workers)
    _emit(args, report.to_json_dict())
    return _gate_exit(report)


def cmd_labelled(args):
    h = rooted_edge(tuple(range(1, args.k + 2)), attached_to=(args.k + 1,))
    anchor = []
    if args.anchor_edges:
        for item in args.anchor_edges.split(","):
            u, v = item.split("-")
            anchor.append((int(u), int(v)))
    report = experiments.labelled_equidist(
        args.k, [h], args.s, args.n, args.p, args.q, args.samples, args.seed,
        anchor_edges=anchor, threshold=args.threshold, workers=args.workers)
    _emit(args, report.to_json_dict())
    return _gate_exit(report)


def cmd_gowers(args):
    Q = _parse_exponent(args.exponent, args.q, args.m) if args.exponent else \
        gip(args.gip_r, args.gip_d, q=args.q)
    f = PhaseFunction.from_polynomial(Q)
    m = Q.m
    if args.measure == "uniform":
        mu = Measure.uniform(args.q, m)
    else:
        mu = Measure.p_biased(args.q, m, Fraction(args.p).limit_denominator(10**6))
    res = gowers_norm(f, mu, args.d, samples=args.samples, seed=args.seed)
    payload = {"value": res.value, "mode": res.mode}
    if res.stderr is not None:
        payload["stderr"] = res.stderr
    _emit(args, payload)
    return 0


def cmd_bias(args):
    Q = _parse_exponent(args.exponent, args.q, args.m) if args.exponent else \
        gip(args.gip_r, args.gip_d, q=args.q)
    if args.mc:
        est = bias_mc(Q, args.p, args.mc, args.seed)
        _emit(args, {"value": est.value, "mode": "mc", "stderr": est.stderr})
    else:
        p = Fraction(args.p).limit_denominator(10**6)
        _emit(args, {"value": bias_exact(Q, p), "mode": "exact"})
    return 0


def cmd_convergence(args):
    phi = parse_formula(args.formula)
    n_list = [int(x) for x in args.n_list.split(",")]
    report = experiments.convergence_experiment(
        phi, args.q, args.p, n_list, args.samples, args.seed,
        c_cap=args.c_cap, workers=args.workers)
    _emit(args, report.to_json_dict())
    return _gate_exit(report)


def _add_common(sp, sampling=True):
    sp.add_argument("--json-out", default=None)
    if sampling:
        sp.add_argument("--samples", type=int, default=100_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="modlaw",
        description="Subgraph frequencies mod q, quantifier elimination, and "
                    "limiting probabilities for counting-quantifier sentences "
                    "on dense random graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate a formula on a concrete graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--env", default=None, help="free-variable bindings: x=0,y=3")
    _add_common(sp, sampling=False)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("limit", help="exact limiting probabilities of a sentence")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--c-cap", type=int, default=7)
    _add_common(sp, sampling=False)
    sp.set_defaults(fn=cmd_limit)

    sp = sub.add_parser("freq", help="frequency vector of a concrete graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--roots", default=None)
    _add_common(sp, sampling=False)
    sp.set_defaults(fn=cmd_freq)

    sp = sub.add_parser("equidist", help="copy counts mod q vs uniform")
    sp.add_argument("--patterns", default="K3")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--threshold", type=float, default=0.02)
    _add_common(sp)
    sp.set_defaults(fn=cmd_equidist)

    sp = sub.add_parser("freqdist", help="frequency vector vs feasible-uniform")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--a", type=int, default=3)
    sp.add_argument("--threshold", type=float, default=0.03)
    _add_common(sp)
    sp.set_defaults(fn=cmd_freqdist)

    sp = sub.add_parser("labelled", help="rooted copy counts vs uniform")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--s", type=int, default=2)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--anchor-edges", default=None, help="edges like 0-1,1-2")
    sp.add_argument("--threshold", type=float, default=0.03)
    _add_common(sp)
    sp.set_defaults(fn=cmd_labelled)

    sp = sub.add_parser("gowers", help="measure-twisted uniformity norm")
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--exponent", default=None, help="e.g. 'Z1*Z2 + 2*Z3'")
    sp.add_argument("--gip-r", type=int, default=2)
    sp.add_argument("--gip-d", type=int, default=2)
    sp.add_argument("--measure", choices=["uniform", "biased"], default="uniform")
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json-out", default=None)
    sp.set_defaults(fn=cmd_gowers)

    sp = sub.add_parser("bias", help="bias of a polynomial under the p-biased measure")
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--exponent", default=None)
    sp.add_argument("--gip-r", type=int, default=2)
    sp.add_argument("--gip-d", type=int, default=2)
    sp.add_argument("--mc", type=int, default=None, help="Monte Carlo sample count")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json-out", default=None)
    sp.set_defaults(fn=cmd_bias)

    sp = sub.add_parser("convergence", help="empirical vs limiting probabilities")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--n-list", default="20,21,22,23,24,25")
    sp.add_argument("--c-cap", type=int, default=7)
    _add_common(sp)
    sp.set_defaults(fn=cmd_convergence)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (GraphError, FormulaError, BiasScaleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
