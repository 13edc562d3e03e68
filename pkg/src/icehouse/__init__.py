"""Six-vertex model toolkit: exact counting, sampling, and estimation
of partition functions on 4-regular multigraphs, with the planar
medial-graph bridge to deletion-contraction invariants."""

from .quadgraph import (
    Dart,
    InstanceError,
    Orientation,
    PatternClass,
    QuadGraph,
    eulerian_orientation,
    is_valid_orientation,
    load_graph,
    random_quad_graph,
    serialize,
    torus_grid,
    vertex_pattern,
)
from .exact import (
    Region,
    Signature,
    SizeCapError,
    Weights,
    classify_region,
    enumerate_Z,
    exact_marginal,
    gibbs_distribution,
    signature_from_weights,
    transfer_matrix_Z,
)
from .holant import GridNode, SignatureGrid, holant_eval, incidence_grid
from .worm import (
    ChainParams,
    InfeasiblePinsError,
    SamplerTimeout,
    WormState,
    exact_transition_matrix,
    marginal_estimate,
    restricted_stationary,
    sample,
    state_weight,
    stationary_distribution,
    step,
)
from .estimator import Estimate, SamplePlan, estimate_Z, exact_marginal_oracle, sample_plan
from .tutte import (
    CrosscheckRow,
    PlaneGraph,
    PlaneGraphError,
    golden_suite,
    load_plane_graph,
    medial_graph,
    serialize_plane_graph,
    spanning_tree_count,
    tutte_crosscheck,
    tutte_eval,
)

__version__ = "0.1.0"
