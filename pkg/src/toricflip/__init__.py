"""toricflip: exact computations with semistable 3-fold degeneration germs.

Classify the normal-form local models, resolve the stably-factorial
("moderate") ones by the canonical weighted-blow-up recursion with exact
discrepancy and fiber-multiplicity certificates, and run the local
semistable-reduction constructions (Newton-polygon base change, toric
normalization, unimodular reduced-fiber triangulations).
"""

from .blowup import (
    BlowupStep,
    ResolutionTree,
    hj_resolve_surface,
    resolve,
    termination_measure,
    weighted_blowup,
)
from .germs import (
    GermClass,
    HypersurfaceGerm,
    QuotientGerm,
    SparsePoly,
    binomial_germ,
    classify,
    discrepancy_toric_valuation,
    f_germ,
    germ_from_dict,
    germ_to_dict,
    index_of,
    is_moderate,
    reid_tai_is_terminal,
    smooth_germ,
    xy_t_germ,
    xyz_t_germ,
)
from .intlinalg import (
    gcd_all,
    hermite_normal_form,
    hj_continued_fraction,
    smith_normal_form,
)
from .reduction import (
    ReductionPlan,
    branch_orders,
    moderate_model,
    normalization_components,
    semistable_resolve_component,
)
from .toric import (
    Lattice,
    LatticeCone,
    Triangulation,
    cone_multiplicity,
    star_subdivide,
    unimodular_triangulate_reduced_fiber,
)

__version__ = "0.1.0"

__all__ = [
    "BlowupStep",
    "GermClass",
    "HypersurfaceGerm",
    "Lattice",
    "LatticeCone",
    "QuotientGerm",
    "ReductionPlan",
    "ResolutionTree",
    "SparsePoly",
    "Triangulation",
    "binomial_germ",
    "branch_orders",
    "classify",
    "cone_multiplicity",
    "discrepancy_toric_valuation",
    "f_germ",
    "gcd_all",
    "germ_from_dict",
    "germ_to_dict",
    "hermite_normal_form",
    "hj_continued_fraction",
    "hj_resolve_surface",
    "index_of",
    "is_moderate",
    "moderate_model",
    "normalization_components",
    "reid_tai_is_terminal",
    "resolve",
    "semistable_resolve_component",
    "smith_normal_form",
    "smooth_germ",
    "star_subdivide",
    "termination_measure",
    "unimodular_triangulate_reduced_fiber",
    "weighted_blowup",
    "xy_t_germ",
    "xyz_t_germ",
]
