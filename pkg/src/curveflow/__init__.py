"""Bakry-Emery curvature, curvature sharpness and the normalized curvature flow
on Markovian weighted mixed graphs."""

from .constructions import (
    TriangleFreeSolution,
    clique_scheme,
    k3_catalog,
    nested_complete_scheme,
    simple_random_walk,
    triangle_free_solve,
)
from .curvature import (
    CurvatureResult,
    curvature,
    curvature_all,
    curvature_bisection,
    curvature_matrix,
    pairwise_lower_bound,
    theoretical_bounds,
    upper_bound_dist,
    upper_bound_dist_sphere_form,
    upper_bound_f,
)
from .errors import (
    CurveflowError,
    FlowBlowUpError,
    GraphValidationError,
    InadmissibleFunctionError,
    InfeasibleConstructionError,
    IsolatedVertexError,
    NotConvergedError,
)
from .flow import FlowConfig, FlowTrajectory, certify_limit, flow_rhs, integrate
from .graph import (
    DegeneracyReport,
    DistanceField,
    MixedGraph,
    WeightingScheme,
    degeneracy,
    distances,
    induced_subgraph,
    load_document,
    make_scheme,
    read_scheme,
    scheme_to_document,
    write_scheme,
)
from .operators import (
    LocalBlocks,
    QMatrix,
    carre_du_champ,
    gamma2,
    gamma2_matrix,
    laplacian,
    local_blocks,
    optimal_extension,
    q_matrix,
    q_matrix_entries,
)
from .sharpness import (
    SharpnessReport,
    complete_graph_defect,
    four_q_one,
    is_n_sharp,
    n_sharp_matrix,
    sharpness_all,
    sharpness_report,
    stationary_distribution,
)
from .sweep import flow_batch, path3_scheme, square_scheme, sweep_path3, sweep_square

__version__ = "0.1.0"
