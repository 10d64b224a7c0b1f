"""Numerical certification of complex-valued harmonic morphisms.

The package builds eigenfamilies of the Laplace-Beltrami and conformality
operators on eight ambient spaces (flat complex and quaternionic spaces
with definite or indefinite metrics, and the unit sphere or pseudosphere
inside each), assembles rational quotients F = P/Q over them, and verifies
numerically that these are harmonic morphisms whose regular fibers are
minimal submanifolds of codimension two.
"""

__version__ = "0.1.0"

from . import errors
from .errors import HarmomorphError
from .families import (
    EigenFamily,
    FamilyReport,
    PolyLift,
    basic_sphere_family,
    catalog,
    lift_poly,
    measure_eigenvalues,
    verify_eigenfamily,
)
from .fibers import (
    FiberPoint,
    FiberSample,
    MinimalityReport,
    MinimalityRow,
    certify,
    holomorphy_defect,
    sample_fiber,
)
from .morphisms import (
    CoefficientPair,
    InvarianceReport,
    MorphismReport,
    RationalMorphism,
    ResolventPolynomial,
    build_morphism,
    dualize,
    is_admissible,
    resolvent,
    verify_invariance,
    verify_morphism,
)
from .operators import (
    NormalFrame,
    OperatorValue,
    fiber_mean_curvature,
    grad_on,
    tau_kappa,
    tau_kappa_flat,
    tau_kappa_on,
)
from .scalar import (
    Jet2,
    ScalarField,
    conjugate,
    evaluate_jet2,
    evaluate_value,
    inner_square,
    wirtinger_view,
    z,
    zbar,
)
from .spaces import (
    AmbientSpace,
    GroupElement,
    SpaceKind,
    TangentVector,
    group_act,
    inner,
    random_group,
    random_point,
    retract,
    tangent_project,
)

__all__ = [
    "__version__",
    "errors",
    "HarmomorphError",
    "EigenFamily",
    "FamilyReport",
    "PolyLift",
    "basic_sphere_family",
    "catalog",
    "lift_poly",
    "measure_eigenvalues",
    "verify_eigenfamily",
    "FiberPoint",
    "FiberSample",
    "MinimalityReport",
    "MinimalityRow",
    "certify",
    "holomorphy_defect",
    "sample_fiber",
    "CoefficientPair",
    "InvarianceReport",
    "MorphismReport",
    "RationalMorphism",
    "ResolventPolynomial",
    "build_morphism",
    "dualize",
    "is_admissible",
    "resolvent",
    "verify_invariance",
    "verify_morphism",
    "NormalFrame",
    "OperatorValue",
    "fiber_mean_curvature",
    "grad_on",
    "tau_kappa",
    "tau_kappa_flat",
    "tau_kappa_on",
    "Jet2",
    "ScalarField",
    "conjugate",
    "evaluate_jet2",
    "evaluate_value",
    "inner_square",
    "wirtinger_view",
    "z",
    "zbar",
    "GroupElement",
    "AmbientSpace",
    "SpaceKind",
    "TangentVector",
    "group_act",
    "inner",
    "random_group",
    "random_point",
    "retract",
    "tangent_project",
]
