"""Følner, Tempel'man and tempered sequences in concrete amenable groups,
with exhaustive checks of the sumset and product-set inequalities about them."""
from .groups import (
    GroupDescriptor,
    GroupElement,
    Kind,
    ZdEmbedding,
    finite_by_free,
    free_abelian,
    identity,
    inverse,
    lamplighter,
    multiply,
    standard_embedding,
    wreath_zz,
)
from .setops import (
    FiniteGroupSet,
    invariance,
    inverse_set,
    product,
    product_size,
    translate,
    union_inverse_product,
)
from .dsl import parse_group_dsl

from .folner import (
    Family,
    FolnerSequenceSpec,
    box_set,
    construct_abelian_tempelman,
    extract_tempered,
    generate,
    lamplighter_standard,
    sequence,
    sequence_report,
    tempelman_constant,
    tempered_constants,
    wreath_standard,
)
from .inequalities import (
    brute_force_oracle,
    check_discrete_bm,
    check_growth_implication,
    check_lemma_abelian_product,
    check_lemma_diff_size,
    check_lemma_same_size,
    check_lower_bound_claim,
)
from .ergodic import (
    BernoulliAction,
    average,
    convergence_sweep,
    coordinate_function,
    mse_slope,
    pair_function,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliAction",
    "Family",
    "FiniteGroupSet",
    "FolnerSequenceSpec",
    "GroupDescriptor",
    "GroupElement",
    "Kind",
    "ZdEmbedding",
    "average",
    "box_set",
    "brute_force_oracle",
    "check_discrete_bm",
    "check_growth_implication",
    "check_lemma_abelian_product",
    "check_lemma_diff_size",
    "check_lemma_same_size",
    "check_lower_bound_claim",
    "construct_abelian_tempelman",
    "convergence_sweep",
    "coordinate_function",
    "extract_tempered",
    "finite_by_free",
    "free_abelian",
    "generate",
    "identity",
    "invariance",
    "inverse",
    "inverse_set",
    "lamplighter",
    "lamplighter_standard",
    "mse_slope",
    "multiply",
    "pair_function",
    "parse_group_dsl",
    "product",
    "product_size",
    "sequence",
    "sequence_report",
    "standard_embedding",
    "tempelman_constant",
    "tempered_constants",
    "translate",
    "union_inverse_product",
    "wreath_standard",
    "wreath_zz",
]
