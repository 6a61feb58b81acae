"""Interpolation of root configurations, canonical stratifications of
polynomial chains, and the induced stratified deformation family, with an
empirical harness for general-position and transversality trials."""

from .config import RunConfig, make_rng
from .deformation import (
    DeformationContext,
    TrackedRoots,
    TrackingPolicy,
    deform,
    deform_projective,
    orbit_jacobian,
    roots_at_level,
    track_roots,
)
from .geometry import (
    ImplicitPatch,
    general_position_trial,
    is_transverse,
    tangent_basis,
    transversality_trial,
)
from .interpolation import (
    InterpolationInput,
    LipschitzReport,
    dpsi_deta,
    gamma,
    gamma_anchored,
    lipschitz_probe,
    psi,
    psi_inverse,
    psi_stratified,
)
from .polyalg import (
    GaussianRational,
    MultiPoly,
    UniPolyView,
    discriminant_in_var,
    linear_coordinate_change,
    poly_eval,
    resultant,
    roots_univariate,
    squarefree_part,
    variables,
)
from .stratification import (
    PolynomialSystem,
    StratumLabel,
    complete_system,
    filtration_depth,
    stratum_label,
    validate_system,
)
from .symmetric import (
    DiscriminantVector,
    MultiplicityType,
    elementary_symmetric,
    f_components,
    generalized_discriminants,
    multiplicity_type,
)

__version__ = "0.1.0"

__all__ = [
    "DeformationContext",
    "DiscriminantVector",
    "GaussianRational",
    "ImplicitPatch",
    "InterpolationInput",
    "LipschitzReport",
    "MultiPoly",
    "MultiplicityType",
    "PolynomialSystem",
    "RunConfig",
    "StratumLabel",
    "TrackedRoots",
    "TrackingPolicy",
    "UniPolyView",
    "complete_system",
    "deform",
    "deform_projective",
    "discriminant_in_var",
    "dpsi_deta",
    "elementary_symmetric",
    "f_components",
    "filtration_depth",
    "gamma",
    "gamma_anchored",
    "general_position_trial",
    "generalized_discriminants",
    "is_transverse",
    "linear_coordinate_change",
    "lipschitz_probe",
    "make_rng",
    "multiplicity_type",
    "orbit_jacobian",
    "poly_eval",
    "psi",
    "psi_inverse",
    "psi_stratified",
    "resultant",
    "roots_at_level",
    "roots_univariate",
    "squarefree_part",
    "stratum_label",
    "tangent_basis",
    "track_roots",
    "transversality_trial",
    "validate_system",
    "variables",
]
