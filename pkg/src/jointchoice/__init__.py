"""Random joint choice of two agents: axioms, Block-Marschak polynomials,
signed and probabilistic decompositions, and exact LP oracles."""

from .core import (
    AlternativeSet,
    Budget,
    ChoiceError,
    ChoiceFunctionPair,
    JointChoiceRule,
    LinearOrder,
    MarginalityError,
    PartialRuleError,
    RandomChoiceRule,
    SignedChoicePairMeasure,
    SignedOrderMeasure,
    SignedPairMeasure,
    induce_from_choice_pairs,
    induce_from_order_pairs,
    induce_from_orders,
    marginal_rules,
    maximal,
)
from .corpus import GeneratorSpec, fixture, generate, random_choice_rule
from .decompose import (
    FlowConservationError,
    PreconditionError,
    decompose_choice_rule,
    decompose_joint_rule,
    recover_separable_rum,
    strip_signed_flow,
)
from .graphs import (
    LatticeFlowGraph,
    branching_relation,
    build_system,
    supported_paths,
    unique_rum_check,
)
from .io import parse_choice_rule, parse_dataset, parse_measure, serialize
from .moebius import (
    BlockMarschakTable,
    InternalError,
    bm_joint,
    bm_marginal,
    check_marginality,
    check_nonnegativity,
    check_recursivity,
    reconstruct_p,
    single_bm,
)
from .oracle import (
    brute_force_unique_rum,
    lp_separable_rum,
    lp_stochastic_separability,
    mset_measure,
    verify_measure,
)

__version__ = "0.1.0"

__all__ = [
    "AlternativeSet",
    "BlockMarschakTable",
    "Budget",
    "ChoiceError",
    "ChoiceFunctionPair",
    "FlowConservationError",
    "GeneratorSpec",
    "InternalError",
    "JointChoiceRule",
    "LatticeFlowGraph",
    "LinearOrder",
    "MarginalityError",
    "PartialRuleError",
    "PreconditionError",
    "RandomChoiceRule",
    "SignedChoicePairMeasure",
    "SignedOrderMeasure",
    "SignedPairMeasure",
    "bm_joint",
    "bm_marginal",
    "branching_relation",
    "brute_force_unique_rum",
    "build_system",
    "check_marginality",
    "check_nonnegativity",
    "check_recursivity",
    "decompose_choice_rule",
    "decompose_joint_rule",
    "fixture",
    "generate",
    "induce_from_choice_pairs",
    "induce_from_order_pairs",
    "induce_from_orders",
    "lp_separable_rum",
    "lp_stochastic_separability",
    "marginal_rules",
    "maximal",
    "mset_measure",
    "parse_choice_rule",
    "parse_dataset",
    "parse_measure",
    "random_choice_rule",
    "reconstruct_p",
    "recover_separable_rum",
    "serialize",
    "single_bm",
    "strip_signed_flow",
    "supported_paths",
    "unique_rum_check",
    "verify_measure",
]
