"""
Recovering a separable random utility model
-------------------------------------------

When one agent's marginal has exactly one random utility representation,
the joint rule pins down a probability measure over order pairs, and the
recovery below finds it.
"""

from jointchoice import (
    AlternativeSet,
    PreconditionError,
    SignedPairMeasure,
    fixture,
    induce_from_order_pairs,
    recover_separable_rum,
    unique_rum_check,
)
from jointchoice.graphs import build_system
from jointchoice.moebius import bm_joint

xs, ys = AlternativeSet(("a", "b", "c")), AlternativeSet(("x", "y"))
truth = SignedPairMeasure.from_labels(xs, ys, [("a b c", "x y", "1/2"), ("c b a", "y x", "1/2")])
rule = induce_from_order_pairs(truth)

check = unique_rum_check(build_system(bm_joint(rule), 1).marginal)
print("edge-uniqueness test:", check.verdict)
for path, (x, a) in check.certificate.items():
    print("  order", path.ranking, "certified by edge", xs.labels[x], xs.names(a))

recovered = recover_separable_rum(rule)
print("recovered the generating measure:", recovered == truth)

###############################################################################
# The counterexample has two supported paths through {c, d} on each side, so
# neither marginal is identified and recovery refuses to run.

try:
    recover_separable_rum(fixture("example1").rule)
except PreconditionError as exc:
    print("example1:", exc)
