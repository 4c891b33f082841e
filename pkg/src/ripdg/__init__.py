"""Interior penalty discontinuous Galerkin solvers in 2D, with classical and
robust weighted-average flux variants, on box and polygonal meshes."""

from .analysis import eoc, error_broken_h1, error_dg, error_l2
from .assembly import (
    IPDG,
    RIPDG,
    RIPDG_DEG,
    AssembledSystem,
    MethodConfig,
    ProblemSpec,
    assemble,
    assemble_degenerate,
    assemble_gradient_gram,
    assemble_norm_matrix,
)
from .basis import DgSpace, element_rule, local_dim
from .flux_weights import (
    FaceCoefficientData,
    FaceSideData,
    FaceWeights,
    degenerate_weights_and_penalty,
    flux_inverse_constant,
    ipdg_penalty,
    legacy_weights,
    polytopic_inverse_constant,
    ripdg_weights_and_penalty,
    trace_inverse_bound,
)
from .linalg import condition_number_2, min_generalized_eig, solve
from .mesh import (
    Mesh,
    MeshError,
    agglomerate,
    build_nine_element,
    build_triangulated_squares,
    build_uniform_squares,
    build_zigzag_nine_element,
    load_mesh,
    mesh_from_text,
    mesh_to_text,
    save_mesh,
    validate,
)
from .quadrature import QuadRule, box_rule, polygon_rule, segment_rule, simplex_rule

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
