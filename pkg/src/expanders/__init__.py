"""Explicit expander graphs: LPS and quaternion Cayley graphs, degree packing,
exact-size constructions, and spectral certification."""

from .cayley_lps import PSL2, build_lps, lps_generators
from .cayley_quaternion import QuaternionGroup, build_quaternion, enumerate_classes, q_size
from .constructions import (
    augment_to_exact,
    delete_and_match,
    find_sparse_set,
    greedy_decompose,
    pack_cayley,
    pack_generators,
    trim_to_exact,
)
from .errors import (
    ConstructionError,
    ConvergenceError,
    DegreeError,
    ExpanderError,
    GraphFormatError,
    HypothesisError,
    PreconditionError,
    SparseSetError,
)
from .graph_core import (
    MultiGraph,
    ball,
    build,
    cycle_rank,
    girth,
    is_bipartite,
    is_connected,
    read_edge_list,
    write_edge_list,
)
from .spectral import certify, delocalization_profile, max_nontrivial_abs_eig, union_bound_check

__version__ = "0.1.0"
