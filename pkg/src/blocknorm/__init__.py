"""Block-anisotropic summing norms of multilinear operators between
finite-dimensional lp spaces.

The library computes nested (anisotropic) sequence norms of operator values
taken over index blocks, estimates the induced summing norms by certified
lower bounds, and ships executable checks for the identities and
inequalities the construction satisfies: norm domination, ideal stability,
rank-one equality, diagonal/multiple/partition reductions, compatibility,
and the bilinear coincidence bound.
"""

from .blocks import Block, NonvoidViolation, make_block
from .multilinear import MultiOperator, apply, compose, finite_type, sup_norm
from .seqnorms import (SUP, ClassSpec, ClassStack, JaggedArray,
                       ScalarSequence, Strong, Sup, UnsupportedClassPosition,
                       VecSequence, Weak, as_stack, class_norm, nested_norm,
                       scalar_class_norm)
from .spaces import (INF, Exponent, FiniteLpSpace, LinearMap, NormResult,
                     Vec, dual_ball_extreme_points, dual_exponent,
                     linear_map_norm, lp_norm, unit_ball_extreme_points,
                     vec_norm)
from .summing import (SCALAR_SPACE, CompatReport, DiagonalizabilityReport,
                      SummingEstimate, block_image, block_value,
                      check_compatibility, check_diagonalizable,
                      multiplication_operator, summing_norm)
from .theorems import (CheckReport, CoincidenceConstants, check_coincidence,
                       check_diagonal_reduction, check_finite_type_norm,
                       check_ideal_inequality, check_multiple_formula,
                       check_norm_domination, check_partition_formula,
                       find_incompatibility_witness)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # spaces
    "Exponent", "INF", "dual_exponent", "FiniteLpSpace", "Vec", "LinearMap",
    "NormResult", "lp_norm", "vec_norm", "unit_ball_extreme_points",
    "dual_ball_extreme_points", "linear_map_norm",
    # seqnorms
    "ClassSpec", "Strong", "Weak", "Sup", "SUP", "ClassStack", "as_stack",
    "VecSequence", "ScalarSequence", "JaggedArray", "class_norm",
    "scalar_class_norm", "nested_norm", "UnsupportedClassPosition",
    # blocks
    "Block", "make_block", "NonvoidViolation",
    # multilinear
    "MultiOperator", "apply", "finite_type", "compose", "sup_norm",
    # summing
    "SCALAR_SPACE", "SummingEstimate", "CompatReport",
    "DiagonalizabilityReport", "multiplication_operator", "block_image",
    "block_value", "summing_norm", "check_compatibility",
    "check_diagonalizable",
    # theorems
    "CheckReport", "CoincidenceConstants", "check_norm_domination",
    "check_ideal_inequality", "check_finite_type_norm",
    "check_diagonal_reduction", "check_multiple_formula",
    "check_partition_formula", "check_coincidence",
    "find_incompatibility_witness",
]
