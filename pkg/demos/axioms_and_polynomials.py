"""
Axioms and Block-Marschak polynomials
-------------------------------------

Two agents choose jointly from a pair of menus. A rule is marginal when each
agent's choice frequencies ignore the other agent's menu. Non-negativity asks
that every Möbius-inverted probability be a genuine probability mass.

The counterexample fixture passes both checks; the four-pair rule obtained
from one preference over pairs fails them.
"""

from jointchoice import bm_joint, check_marginality, check_nonnegativity, check_recursivity, fixture
from jointchoice.moebius import bm_to_dict

rule = fixture("example1").rule
bm = bm_joint(rule)
print("marginality:", check_marginality(rule).verdict)
print("recursivity:", check_recursivity(bm).verdict)
print("non-negativity:", check_nonnegativity(bm).verdict)

###############################################################################
# Every nonzero polynomial of this rule is 1/2. Here are the ones on the
# smallest first-agent menus.

for entry in bm_to_dict(bm)["entries"]:
    if len(entry["A"]) == 1:
        print(entry)

###############################################################################
# A single order over outcome pairs does not separate into two orders, and the
# polynomial of the singleton pair ({a}, {c}) comes out at -1.

pairs = fixture("remark_rule").rule
report = check_nonnegativity(bm_joint(pairs))
for w in report.witnesses:
    print(w.where, w.lhs)
print("marginality:", check_marginality(pairs).verdict)
