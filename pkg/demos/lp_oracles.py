"""
Exact LP oracles
----------------

Feasibility questions are answered with a rational two-phase simplex, so an
"infeasible" verdict is exact. A positive phase-1 objective is the evidence.
"""

from jointchoice import fixture, lp_separable_rum, lp_stochastic_separability, marginal_rules, brute_force_unique_rum

for name in ("table1", "table2"):
    result = lp_stochastic_separability(fixture(name).rule)
    print(f"{name}: {result.verdict} ({result.n_variables} choice-function pairs, "
          f"phase-1 objective {result.phase1_objective})")

rule = fixture("example1").rule
result = lp_separable_rum(rule)
print("example1 separable random utility:", result.verdict)

###############################################################################
# Each marginal of the counterexample has a whole polytope of rationalizing
# distributions; two of its points are shown.

p1, _ = marginal_rules(rule)
uniq = brute_force_unique_rum(p1)
print("first marginal:", uniq.verdict)
for measure in uniq.certificates:
    print({"".join(rule.x_set.labels[i] for i in r): str(w) for r, w in measure.weights.items()})
