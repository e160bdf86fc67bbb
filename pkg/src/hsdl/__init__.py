"""Numerical laboratory for displacement lower bounds of nonvanishing vector fields."""

__version__ = "0.1.0"

from .errors import ConvergenceError, InputError, PreconditionError
from .geometry import Ball, ConvexBody, Ellipsoid, HPolytope, RadiusEstimate, body_from_json, box
from .norms import (Euclidean, Lp, Norm, Polyhedral, Pushforward, Weighted,
                    equivalence_constants, norm_from_json, nu_constant, r_star)
from .fields import (Affine, BoundaryTranslate, Custom, DisplacementForm, KakutaniShift,
                     Poly1D, RadialExtension, Rotation2D, Scaled, SubspaceSplit, Translation,
                     VectorField, constant, field_from_json, identity, kakutani_fixed_point,
                     make_subspace_construction, rotation_sup_displacement)
from .optimize import SearchBudget
from .vi import (BOUNDARY_INWARD_NORMAL, INTERIOR_ZERO, UNCLASSIFIED, SolveConfig,
                 VIProblem, VISolution, classify, natural_residual, solve)
from .displacement import (BoundReport, DisplacementEstimate, check_eigen_bound,
                           check_lower_bound, find_functional_zero, growth_profile,
                           inf_norm, projection_minorant_check, sharpness_witness,
                           sup_displacement)
from .harness import CampaignConfig, render_plot, report_hash_of, run_campaign

__all__ = [
    "__version__",
    "InputError", "PreconditionError", "ConvergenceError",
    "ConvexBody", "Ball", "HPolytope", "Ellipsoid", "RadiusEstimate", "body_from_json", "box",
    "Norm", "Euclidean", "Lp", "Weighted", "Polyhedral", "Pushforward",
    "equivalence_constants", "nu_constant", "r_star", "norm_from_json",
    "VectorField", "Rotation2D", "Translation", "BoundaryTranslate", "Affine", "Scaled",
    "KakutaniShift", "RadialExtension", "DisplacementForm", "SubspaceSplit", "Poly1D",
    "Custom", "identity", "constant", "rotation_sup_displacement", "kakutani_fixed_point",
    "make_subspace_construction", "field_from_json",
    "SearchBudget",
    "VIProblem", "VISolution", "SolveConfig", "solve", "natural_residual", "classify",
    "INTERIOR_ZERO", "BOUNDARY_INWARD_NORMAL", "UNCLASSIFIED",
    "DisplacementEstimate", "BoundReport", "sup_displacement", "inf_norm",
    "check_lower_bound", "check_eigen_bound", "sharpness_witness",
    "projection_minorant_check", "growth_profile", "find_functional_zero",
    "CampaignConfig", "run_campaign", "render_plot", "report_hash_of",
]
