import json
from itertools import product

import pytest

from systemg.modelspace import preorders
from systemg.semantics import truth_set, validate_model
from systemg.syntax import Atom, Box, Neg, Ob, Or, Top, modal_depth, parse, size, subformulas
from systemg.testkit import (SCHEMAS, Confirmation, Counterexample, Schema, all_formulas,
                             check_equivalence, check_validity, count_models,
                             enumerate_models, instantiate, random_formula, schema_suite)

p, q = Atom("p"), Atom("q")


def preorder_oracle(n):
    """Distinct total preorders on n labelled points, from all n**n rank maps."""
    relations = set()
    for ranks in product(range(n), repeat=n):
        relations.add(frozenset((i, j) for i in range(n) for j in range(n)
                                if ranks[i] <= ranks[j]))
    return relations


class TestEnumeration:
    @pytest.mark.parametrize("n, atoms, count", [(1, ["p"], 2), (2, [], 3), (3, ["p"], 104)])
    def test_counts(self, n, atoms, count):
        models = list(enumerate_models(n, atoms))
        assert len(models) == count == count_models(n, atoms)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_preorders_match_oracle(self, n):
        induced = {frozenset((i, j) for i in range(n) for j in range(n) if r[i] <= r[j])
                   for r in preorders(n)}
        assert len(induced) == len(preorders(n))
        assert induced == preorder_oracle(n)

    def test_models_distinct_and_valid(self):
        seen = set()
        for m in enumerate_models(3, ["p"]):
            assert validate_model(m).ok
            key = (tuple(m.rank[w] for w in m.worlds), tuple(sorted(m.valuation["p"])))
            seen.add(key)
        assert len(seen) == 104

    @pytest.mark.parametrize("n", [0, 6])
    def test_guard(self, n):
        with pytest.raises(ValueError):
            list(enumerate_models(n, ["p"]))


class TestRandomFormula:
    def test_single_node(self):
        for seed in range(30):
            assert random_formula(1, ["p"], seed) in (p, Top())

    def test_deterministic(self):
        assert random_formula(12, ["p", "q"], 42) == random_formula(12, ["p", "q"], 42)

    def test_size_bound(self):
        for seed in range(300):
            assert size(random_formula(9, ["p", "q"], seed)) <= 9

    def test_every_constructor_and_deep_nesting_reachable(self):
        samples = [random_formula(12, ["p", "q"], seed) for seed in range(1000)]
        assert max(modal_depth(f) for f in samples) >= 2
        kinds = {type(g) for f in samples for g in subformulas(f)}
        assert kinds == {Atom, Top, Neg, Or, Ob, Box}

    def test_propositional_only(self):
        for seed in range(100):
            assert modal_depth(random_formula(10, ["p"], seed, modal=False)) == 0

    def test_exhaustive_enumeration(self):
        fs = all_formulas(3, ["p"])
        # sizes 1, 2, 3 over leaves {p, true}
        assert len(set(fs)) == len(fs)
        assert Ob(p, Top()) in fs and Box(Neg(p)) in fs and Or(p, p) in fs
        assert all(size(f) <= 3 for f in fs)


class TestEquivalence:
    def test_box_law(self):
        res = check_equivalence(parse("[]p"), parse("O(false | ~p)"), 3)
        assert isinstance(res, Confirmation) and res
        assert res.label.startswith("no counterexample up to 3 world(s)")

    def test_converse_obligation_differs(self):
        res = check_equivalence(parse("O(p|q)"), parse("O(q|p)"), 2)
        assert isinstance(res, Counterexample) and not res
        # confirm with the set-based evaluator
        left = res.world in truth_set(res.model, parse("O(p|q)"))
        right = res.world in truth_set(res.model, parse("O(q|p)"))
        assert left == res.left_value and right == res.right_value
        assert left != right

    def test_reflexive(self):
        assert isinstance(check_equivalence(p, p, 1), Confirmation)

    def test_validity(self):
        assert check_validity(parse("O(p|p)"), 3)
        assert not check_validity(parse("O(p|q)"), 2)

    def test_guard(self):
        with pytest.raises(ValueError):
            check_equivalence(p, q, 6)

    def test_counterexample_dict(self):
        res = check_equivalence(p, q, 1)
        d = res.to_dict()
        assert d["world"] == res.world
        assert set(d["model"]) == {"worlds", "rank", "valuation"}


class TestSchemas:
    def test_named_axioms_present(self):
        names = {s.name for s in SCHEMAS}
        required = {"DfP", "COK", "Abs", "CON", "Ext", "Id", "C", "D*", "S",
                    "S5-K", "S5-T", "S5-4", "S5-5",
                    "gExt", "gExt+", "gExt-", "gCOK", "gCOK+", "gCOK-"}
        assert required <= names

    def test_id_instance(self):
        (sch,) = [s for s in SCHEMAS if s.name == "Id"]
        inst = instantiate(sch, [p])
        assert inst == Ob(p, p)
        for m in enumerate_models(3, ["p"]):
            assert truth_set(m, inst) == m.world_set

    def test_d_star_instance(self):
        assert check_validity(parse("<>q -> (O(p|q) -> P(p|q))"), 3)

    def test_gcok_plus_instance(self):
        f = parse("[]O(s|t) -> (O(p \\/ (q /\\ O(s|t)) | r) -> O(p \\/ q | r))")
        assert check_validity(f, 3)

    def test_atomic_suite_clean(self):
        report = schema_suite(2, "atomic")
        assert report.ok
        assert {r.schema for r in report.results} == {s.name for s in SCHEMAS}

    def test_report_json(self):
        report = schema_suite(2, "atomic", schemas=[s for s in SCHEMAS if s.name == "Id"])
        (entry,) = json.loads(report.to_json())["results"]
        assert entry["schema"] == "Id"
        assert entry["instance"] == "O(p | p)"
        assert entry["models_checked"] == count_models(1, ["p"]) + count_models(2, ["p"])
        assert entry["counterexamples"] == []

    def test_counterexamples_reported(self):
        bogus = Schema("converse", parse("O(phi | psi) -> O(psi | phi)"), "derived")
        report = schema_suite(2, "atomic", schemas=[bogus])
        assert not report.ok
        (bad,) = report.failures()
        ce = bad.counterexamples[0]
        assert ce.world not in truth_set(ce.model, bad.instance)

    def test_rejects_object_atoms_in_template(self):
        with pytest.raises(ValueError):
            Schema("mixed", parse("O(p | phi)"), "axiom")

    def test_propositional_instances_use_pool(self):
        (sch,) = [s for s in SCHEMAS if s.name == "Id"]
        report = schema_suite(1, "propositional", schemas=[sch])
        assert len(report.results) == 6
        assert report.ok
