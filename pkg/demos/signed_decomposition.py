"""
Signed decompositions
---------------------

Any marginal rule is induced by a measure over pairs of orders, provided the
measure may take negative values. The construction peels lattice flows one
path at a time.
"""

from jointchoice import decompose_choice_rule, decompose_joint_rule, fixture, random_choice_rule, verify_measure

###############################################################################
# A single agent first: this rule has a negative polynomial, so no probability
# over orders can produce it, yet a signed one can.

p = random_choice_rule(seed=0, n=4, negative=True)
nu = decompose_choice_rule(p)
for ranking, w in nu.weights.items():
    print(" > ".join(p.ground.labels[i] for i in ranking), w)
print("reproduces the rule:", verify_measure(p, nu).verdict)

###############################################################################
# Now the two-agent counterexample. The measure sums to 1 but has negative
# weights; every choice probability and every polynomial is matched exactly.

rule = fixture("example1").rule
measure = decompose_joint_rule(rule)
negative = {k: w for k, w in measure.weights.items() if w < 0}
print(len(measure.weights), "order pairs,", len(negative), "with negative weight")
print("total mass:", sum(measure.weights.values()))
print("verify:", verify_measure(rule, measure).verdict)
