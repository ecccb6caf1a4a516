"""
Evaluating conditional obligations
==================================

Build a two-world preference model by hand, evaluate a few formulas in
it, and then count how many small models there are.
"""

from systemg import Model, is_globally_true, opt_set, parse, truth_set
from systemg.testkit import count_models

# w2 is strictly better than w1; p holds only at w2, q everywhere
m = Model(worlds=("w1", "w2"), rank={"w1": 0, "w2": 1},
          valuation={"p": {"w2"}, "q": {"w1", "w2"}})
print(m.report.ok)

# The best q-worlds are exactly {w2}, and p holds there, so O(p|q) is true
print(opt_set(m, truth_set(m, parse("q"))))
for text in ("O(p | q)", "O(~p | q)", "P(~p | ~p)", "[]q", "<>p", "p"):
    print(f"{text:12s} {is_globally_true(m, parse(text)).value}")

# Models are counted up to relabelling of ranks: 1, 3, 13, 75, 541 orders
for n in range(1, 5):
    print(n, count_models(n, []), count_models(n, ["p"]))
