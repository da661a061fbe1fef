"""Subgraph-frequency arithmetic mod q for FO[Mod_q] on dense random graphs.

The package computes exact injective-homomorphism counts of small patterns,
the gluing/extension algebra those counts satisfy, and a quantifier
elimination that turns small FO[Mod_q] sentences into predicates on
frequency vectors, from which exact limiting probabilities along residue
classes of n are derived.  A Monte Carlo harness certifies the
equidistribution statements at desk scale.
"""

from .graphs import (
    Graph,
    GraphError,
    LabelledGraph,
    TypeTau,
    canonical_form,
    enumerate_connected,
    enumerate_label_connected,
    graph_from_json,
    graph_to_json,
    k1_pattern,
    pattern,
    quotient,
    rooted_edge,
    sample_conditioned,
    sample_gnp,
    type_of,
)

__all__ = [
    "Graph",
    "GraphError",
    "LabelledGraph",
    "TypeTau",
    "canonical_form",
    "enumerate_connected",
    "enumerate_label_connected",
    "graph_from_json",
    "graph_to_json",
    "k1_pattern",
    "pattern",
    "quotient",
    "rooted_edge",
    "sample_conditioned",
    "sample_gnp",
    "type_of",
]

__version__ = "0.1.0"
