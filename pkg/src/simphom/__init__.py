"""Homophily of group interactions on graphs, hypergraphs and simplicial complexes."""

__version__ = "0.1.0"

from .complex import (  # noqa: E402
    ClassLabeling,
    Hypergraph,
    SimplicialComplex,
    build_complex,
    complex_from_hypergraph,
    enumerate_potential_k_simplices,
    is_homogeneous,
    k_skeleton,
    potential_simplices,
    type_count,
)
from .errors import (  # noqa: E402
    DomainError,
    InputError,
    MalformedInputError,
    MissingLabelError,
    ParseError,
    SimphomError,
    UndefinedScoreError,
)
from .homophily import (  # noqa: E402
    ScoreReport,
    TypeProfile,
    affinity,
    graph_score,
    hetero_hypergraph_baseline,
    hetero_scores,
    hetero_simplicial_baseline,
    hypergraph_baseline,
    hypergraph_score,
    simplicial_baseline,
    simplicial_score,
    type_affinity,
)
