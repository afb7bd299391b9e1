"""Meteor graphs: state-splitting moves, talented monoids and a complete
shift-equivalence invariant for graphs with one source and one sink cycle."""

from .graph import Edge, Graph, GraphError, adjacency_matrix, is_essential, is_isomorphic
from .io import ParseError, load_graph, load_matrix, parse_graph_text, parse_matrix_text
from .matrix import IntMatrix
from .meteor import (
    MeteorProfile,
    MeteorStructure,
    NotMeteorError,
    classify,
    closure_check,
    equivalent,
    profile,
    recognize,
    residue_counts,
)
from .monoid import Equality, MonoidElement, monoid_equal
from .moves import MoveError, MoveRecord, in_amalgamate, in_split, out_amalgamate, out_split, replay
from .normal_form import Witness, canonical_graph, canonicalize, normalize, verify_witness, witness
from .talented import TalentedElement, archimedean_class, leaf_set, talented_equal, vw_form

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "Equality",
    "Graph",
    "GraphError",
    "IntMatrix",
    "MeteorProfile",
    "MeteorStructure",
    "MonoidElement",
    "MoveError",
    "MoveRecord",
    "NotMeteorError",
    "ParseError",
    "TalentedElement",
    "Witness",
    "adjacency_matrix",
    "archimedean_class",
    "canonical_graph",
    "canonicalize",
    "classify",
    "closure_check",
    "equivalent",
    "in_amalgamate",
    "in_split",
    "is_essential",
    "is_isomorphic",
    "leaf_set",
    "load_graph",
    "load_matrix",
    "monoid_equal",
    "normalize",
    "out_amalgamate",
    "out_split",
    "parse_graph_text",
    "parse_matrix_text",
    "profile",
    "recognize",
    "replay",
    "residue_counts",
    "talented_equal",
    "verify_witness",
    "vw_form",
    "witness",
]
