"""coxforge: diagram-level algorithms for Coxeter systems — finite-type
classification, word reduction, coset enumeration, visual conjugacy,
blow-ups to maximum rank, diagram twisting, visual graph-of-groups
decomposition, and the simplex census."""

from .diagram import INF, CoxeterDiagram, DiagramError, canonical_form, parse_diagram
from .classify import TypeTag, classify_irreducible, is_spherical, longest_auto, order_of
from .oracle import (
    CosetLimitError,
    brute_conjugate_subsets,
    element_order,
    group_order,
    longest_word,
    reduce_word,
    todd_coxeter,
)
from .conjugacy import are_conjugate_visual, conjugacy_class, conjugate_into
from .matching import (
    Lineage,
    blow_up,
    can_blow_up,
    find_bases,
    find_max_spherical_simplices,
    match_bases,
    match_edge,
    match_subbase,
    max_rank,
    verify_lineage,
)
from .decompose import (
    GraphOfGroups,
    Separation,
    apply_twist,
    build_lambda,
    c_minimal_classes,
    elementary_twist,
    equalize_edge_groups,
    find_separations,
    generalized_twist,
    realize_tree,
)
from .census import Census, compare_census, simplex_census

__version__ = "0.1.0"
