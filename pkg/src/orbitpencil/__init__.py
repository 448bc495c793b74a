"""Poisson pencils of r-matrix type on coadjoint orbits of compact groups.

The package builds A-series Chevalley/compact bases with explicit
matrices, the standard and compact r-matrices and their Schouten squares,
the group-level pencil tensor with rank and degeneracy diagnostics, a
small coordinate-chart Schouten calculus, and checks of the geometric
prequantization condition pi + L_X pi = P(omega) on model structures and
on the 2-sphere pencil.
"""

from .errors import (
    ConfigError,
    DegeneratePoint,
    DomainError,
    InvalidParabolic,
    OrbitPencilError,
    OutOfRange,
    ShapeError,
    UnsupportedAlgebra,
)
from .liealg import (
    GroupElement,
    LieBasis,
    RootSystem,
    adjoint_matrix,
    basis_to_json,
    build_basis,
    build_root_system,
    chevalley_basis,
    compact_basis,
    haar_samples,
    identity_element,
    longest_weyl_representative,
    random_group_element,
    trace_form,
)
from .pencil import (
    CoalgebraPoint,
    PencilPoint,
    PencilReport,
    coset_coordinate,
    cp1_chart_bivector,
    cross_check_group_vs_chart,
    degeneracy_scan,
    kks_matrix,
    leading_minor_rank,
    linear_poisson_bivector,
    pencil_tensor,
    r_bracket_matrix,
    spectral_bound,
    weyl_flip_residual,
)
from .prequant import (
    CertificationRecord,
    ObstructionResult,
    PrequantConvention,
    VaismanInstance,
    certify_nilpotent_cone,
    certify_scaled_plane,
    cp1_obstruction,
    obstruction_verdict,
    prequantum_commutator_check,
    select_prequant_convention,
    vaisman_residual,
)
from .rmatrix import (
    Tensor2,
    Tensor3,
    ad_tensor2,
    ad_tensor3,
    check_ad_invariance,
    compact_r,
    drinfeld_jimbo_r,
    parabolic_r,
    schouten_square,
    tensor_to_json,
    transport_tensor2,
    transport_tensor3,
)
from .schouten import (
    ChartBivector,
    ChartForm2,
    ChartFunction,
    ChartVector,
    Rectangle,
    hamiltonian_vector,
    hamiltonian_vector_field,
    jacobiator,
    lie_derivative_bivector,
    p_inverse,
    p_map,
    poisson_differential,
    poisson_differential_field,
    random_polynomial,
    schouten_bracket,
)

__version__ = "0.1.0"
