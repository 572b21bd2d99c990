"""Directed low-diameter decompositions (C++ core)."""

from ._dldd import (
    Digraph,
    ParseError,
    ball,
    check_inequalities,
    check_separation,
    check_structure,
    decompose,
    distances,
    estimate_edge_cut,
    generate,
    independence_test,
    parse_dimacs,
    sample_trunc_exp,
    sccs,
    trunc_exp_pmf,
    weak_diameter,
    write_dimacs,
)

__all__ = [
    "Digraph",
    "ParseError",
    "ball",
    "check_inequalities",
    "check_separation",
    "check_structure",
    "decompose",
    "distances",
    "estimate_edge_cut",
    "generate",
    "independence_test",
    "parse_dimacs",
    "sample_trunc_exp",
    "sccs",
    "trunc_exp_pmf",
    "weak_diameter",
    "write_dimacs",
]
