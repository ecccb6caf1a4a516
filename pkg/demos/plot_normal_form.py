"""
Flattening nested obligations
=============================

Rewrite formulas with nested modalities into a disjunction of
conjunctions whose obligations take only propositional arguments, and
confirm each result on every small model.
"""

from systemg import check_equivalence, normalize, parse

# A single obligation with another one inside its antecedent
f = parse("O(p | q \\/ (r /\\ O(s|t)))")
u, trace = normalize(f)
print(u)
for line in trace.lines():
    print("  ", line)

# The box is expressible with the dyadic operator alone
print(normalize(parse("[]p"))[0])

# Deeper nesting, with and without the clean-up pass
g = parse("~O([]p | O(q|r)) \\/ O(O(p|q) | r)")
for simplify in (False, True):
    u, trace = normalize(g, simplify=simplify)
    print(f"simplify={simplify}: {len(u.disjuncts)} disjuncts, {len(trace.steps)} steps")
    print("  ", check_equivalence(g, u.to_formula(), 3))
