"""
Tropigon - Trigonal Metric Graphs and Their Moduli

This package computes with divisors on metric graphs, harmonic morphisms of
graphs, degree-3 covers of metric trees built from trigonal divisors, and the
maximal cells of the moduli space of trigonal tropical curves.
"""

from .divisor_theory import (
    Divisor,
    RationalFn,
    divisor_of,
    dhar_burn,
    find_trigonal_divisor,
    linearly_equivalent,
    rank,
    reduce,
)
from .errors import (
    DivisorError,
    DocumentError,
    GraphError,
    MetricGraphError,
    ModuliError,
    MorphismError,
    TrigonalBuilderError,
    TropigonError,
)
from .graph_core import WeightedGraph, are_isomorphic, stable_model
from .harmonic_morphism import IndexedMorphism, check_morphism, pullback, remove_contractions
from .metric_graph import MetricGraph, Point, canonical_model, refine_at
from .moduli_cells import (
    TrigonalType,
    build_3_ladders,
    certify_admissible,
    maximal_cells,
    moduli_summary,
    phi_contract,
)
from .serialization import emit, parse
from .trigonal_builder import (
    TrigonalCover,
    build_trigonal_cover,
    build_trigonal_cover_with_loops,
    trigonal_cover,
)

__version__ = "0.1.0"
__all__ = [
    "Divisor",
    "RationalFn",
    "divisor_of",
    "dhar_burn",
    "find_trigonal_divisor",
    "linearly_equivalent",
    "rank",
    "reduce",
    "DivisorError",
    "DocumentError",
    "GraphError",
    "MetricGraphError",
    "ModuliError",
    "MorphismError",
    "TrigonalBuilderError",
    "TropigonError",
    "WeightedGraph",
    "are_isomorphic",
    "stable_model",
    "IndexedMorphism",
    "check_morphism",
    "pullback",
    "remove_contractions",
    "MetricGraph",
    "Point",
    "canonical_model",
    "refine_at",
    "TrigonalType",
    "build_3_ladders",
    "certify_admissible",
    "maximal_cells",
    "moduli_summary",
    "phi_contract",
    "emit",
    "parse",
    "TrigonalCover",
    "build_trigonal_cover",
    "build_trigonal_cover_with_loops",
    "trigonal_cover",
]
