"""Commuting-matrix models for moduli of modules over differential
algebras on complex tori.

The package has two scalar regimes, exact Gaussian rationals and complex
floating point, shared by every layer: linear algebra (``linalg``),
differential-algebra classification triples (``dalgebra``), period
lattices and their chart maps (``torus``), commuting-tuple models of the
punctual moduli (``adhm``), the assembled length-n moduli with their
transforms (``moduli``), and the seeded property battery (``checks``)
behind the ``abelmod check`` command line.
"""

from .adhm import (
    CommutingTuple,
    IdealNormalForm,
    InvariantFlag,
    MarkedTuple,
    PunctualData,
    centralizer_dim,
    check_commuting,
    common_eigenvector,
    decompose_punctual,
    expm1_matrix,
    from_points,
    ideal_normal_form,
    is_stable,
    joint_spectrum,
    krylov_span,
    log1p_matrix,
    marked_automorphisms_trivial,
    punctual_transport,
    rees_family,
    rees_limit,
    sequiv_normal_form,
    spectrum_support,
    triangularize,
)
from .dalgebra import (
    DAlgebraLabel,
    Poly,
    UtaiTriple,
    bracket_sections,
    classify,
    cohomology_dim,
    fm_dual,
    gl_act,
    jacobi_check,
    orbit_invariants,
    truncated_cohomology_dim,
)
from .errors import AbelmodError, SchemaError
from .linalg import EXACT, FLOAT, Matrix, Scalar, ToleranceFrame
from .moduli import (
    FiberSpace,
    HilbPoint,
    SymPoint,
    assemble_pieces,
    betti_assemble,
    betti_marked,
    betti_unmarked,
    diagram_check,
    hilbert_chow,
    hodge_deform,
    hodge_rescale,
    hodge_undeform,
    rank1_identify,
    rh_to_betti,
    rh_to_derham,
)
from .torus import (
    AbelianVarietyModel,
    BettiPoint,
    NaturalPoint,
    dual_lattice,
    exp_rh,
    gstar_act,
    log_rh,
    natural_project,
    natural_split,
    square_model,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianVarietyModel",
    "AbelmodError",
    "BettiPoint",
    "CommutingTuple",
    "DAlgebraLabel",
    "EXACT",
    "FLOAT",
    "FiberSpace",
    "HilbPoint",
    "IdealNormalForm",
    "InvariantFlag",
    "MarkedTuple",
    "Matrix",
    "NaturalPoint",
    "Poly",
    "PunctualData",
    "Scalar",
    "SchemaError",
    "SymPoint",
    "ToleranceFrame",
    "UtaiTriple",
    "assemble_pieces",
    "betti_assemble",
    "betti_marked",
    "betti_unmarked",
    "bracket_sections",
    "centralizer_dim",
    "check_commuting",
    "classify",
    "cohomology_dim",
    "common_eigenvector",
    "decompose_punctual",
    "diagram_check",
    "dual_lattice",
    "exp_rh",
    "expm1_matrix",
    "fm_dual",
    "from_points",
    "gl_act",
    "gstar_act",
    "hilbert_chow",
    "hodge_deform",
    "hodge_rescale",
    "hodge_undeform",
    "ideal_normal_form",
    "is_stable",
    "jacobi_check",
    "joint_spectrum",
    "krylov_span",
    "log1p_matrix",
    "log_rh",
    "marked_automorphisms_trivial",
    "natural_project",
    "natural_split",
    "orbit_invariants",
    "punctual_transport",
    "rank1_identify",
    "rees_family",
    "rees_limit",
    "rh_to_betti",
    "rh_to_derham",
    "sequiv_normal_form",
    "spectrum_support",
    "square_model",
    "triangularize",
    "truncated_cohomology_dim",
    "__version__",
]
