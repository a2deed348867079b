"""2D lattice spring solver with rotation-invariant multi-bond cells."""

from .benchmarks import (
    CANTILEVER,
    CASE_KINDS,
    PURE_BENDING,
    PURE_SHEAR,
    SLENDER_MESHES,
    SQUARE_MESHES,
    UNIAXIAL,
    BenchmarkCase,
    ConvergenceStudy,
    ErrorReport,
    MeshError,
    analytical_field,
    cantilever_case,
    case_constraints,
    case_loads,
    case_mesh,
    convergence_study,
    make_case,
    moment_to_linear_traction,
    pure_bending_case,
    pure_shear_case,
    run_case,
    uniaxial_case,
)
from .cell import (
    CANONICAL_MODES,
    DOF_ORDER,
    EIGENFORMS,
    INDEFINITE,
    POSITIVE_DEFINITE_ON_DEFORMATIONS,
    SEMIDEFINITE_DEGENERATE,
    EigenReport,
    Gradient2D,
    affine_energy,
    born_matrix,
    cell_matrix,
    corner_displacements,
    definiteness,
    eigen_analysis,
    modified_matrix,
    quadratic_energy,
)
from .lattice import (
    EDGES,
    LINEAR,
    UNIFORM,
    Constraints,
    EdgeTraction,
    GlobalSystem,
    LatticeSpec,
    LoadSpec,
    Mesh,
    ReducedSystem,
    SingularSystemError,
    Solution,
    apply_constraints,
    apply_loads,
    assemble,
    build_mesh,
    constrained_spectrum,
    fix_nodes,
    solve,
    system_inertia,
)
from .materials import (
    BORN,
    MODELS,
    MODIFIED,
    PLANE_STRAIN,
    PLANE_STRESS,
    REGIMES,
    ElasticityTensor2D,
    Material,
    StiffnessSet,
    anisotropy_factor,
    calibrate,
    continuum_tensor,
    elasticity_tensor,
)

__version__ = "0.1.0"
