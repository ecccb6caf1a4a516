"""
Checking axiom schemas on small models
======================================

Instantiate every axiom and derived schema, check the instances on all
models with up to three worlds, and watch a false schema get caught.
"""

from collections import Counter

from systemg import parse
from systemg.testkit import Schema, schema_suite

report = schema_suite(3, "atomic")
print(report.ok, len(report.results), "instances")

# The propositional pool substitutes p, ~p, p\/q, p/\q, true and false
report = schema_suite(3, "propositional")
print(report.ok, Counter(r.source for r in report.results))

# The converse of an obligation is not valid; the suite reports a model
converse = Schema("converse", parse("O(phi | psi) -> O(psi | phi)"), "derived")
bad = schema_suite(2, "atomic", schemas=[converse]).failures()[0]
print(bad.instance, "fails at", bad.counterexamples[0].world)
print(bad.counterexamples[0].model.to_json())
