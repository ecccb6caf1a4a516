"""Acceptance criteria for the library as a whole.

Each test carries ``@pytest.mark.acceptance(n, description)``; the
conftest hook prints one PASS/FAIL line per criterion after the run.
"""
import random
import time
from itertools import combinations, product

import pytest

from systemg.modelspace import preorders
from systemg.normalize import CITATIONS, normalize, pull_prenex
from systemg.semantics import Globality, is_globally_true, opt_set
from systemg.syntax import (BOT, Box, Neg, Ob, Or, ShapeFailure, conj, modal_depth,
                            subformulas, udnf_shape)
from systemg.testkit import (Confirmation, all_formulas, check_equivalence, enumerate_models,
                             random_formula, random_model, schema_suite)


def confirmed(f, g, n):
    return isinstance(check_equivalence(f, g, n), Confirmation)


@pytest.mark.acceptance(1, "box elimination law on 200 random formulas, <=4 worlds")
def test_box_elimination_law():
    start = time.perf_counter()
    failures = []
    for seed in range(200):
        phi = random_formula(8, ["p", "q"], seed)
        if not confirmed(Box(phi), Ob(BOT, Neg(phi)), 4):
            failures.append(phi)
    assert failures == []
    assert time.perf_counter() - start < 30


@pytest.mark.acceptance(2, "prenex-pulling equivalences (all four items), <=3 worlds")
def test_pulling_equivalences():
    start = time.perf_counter()
    atoms = ["p", "q", "r"]
    rng = random.Random(2)
    failures = []
    for _ in range(50):
        other, pi, lam, c, a = (random_formula(rng.randint(1, 6), atoms, rng.randrange(1 << 30),
                                               modal=False) for _ in range(5))
        ohat = Ob(c, a)
        for position, sign in product(("antecedent", "consequent"), ("positive", "negative")):
            s = ohat if sign == "positive" else Neg(ohat)
            split = Or(pi, conj(lam, s))
            lhs = Ob(other, split) if position == "antecedent" else Ob(split, other)
            rhs = pull_prenex(position, sign, other, pi, lam, ohat)
            if not confirmed(lhs, rhs, 3):
                failures.append((position, sign, lhs))
    assert failures == []
    assert time.perf_counter() - start < 60


def _normal_form_failures(fs):
    failures = []
    for f in fs:
        u, _ = normalize(f)
        out = u.to_formula()
        if isinstance(udnf_shape(out), ShapeFailure) or modal_depth(out) > 1:
            failures.append((f, "shape"))
        elif any(isinstance(g, Box) for g in subformulas(out)):
            failures.append((f, "box"))
        elif not confirmed(f, out, 4):
            failures.append((f, "not equivalent"))
    return failures


@pytest.mark.acceptance(3, "normal form end to end: exhaustive <=6 nodes plus 1000 random <=12 nodes")
def test_normal_form_end_to_end():
    start = time.perf_counter()
    exhaustive = all_formulas(6, ["p", "q"])
    randoms = [random_formula(12, ["p", "q", "r"], 10_000 + seed) for seed in range(1000)]
    failures = _normal_form_failures(exhaustive) + _normal_form_failures(randoms)
    print(f"\n{len(exhaustive)} exhaustive + {len(randoms)} random formulas, "
          f"{time.perf_counter() - start:.1f}s")
    assert failures == []
    assert time.perf_counter() - start < 600


@pytest.mark.acceptance(4, "schema suite at <=3 worlds, atomic and propositional instances")
def test_schema_suite():
    start = time.perf_counter()
    reports = [schema_suite(3, "atomic"), schema_suite(3, "propositional")]
    bad = [r for rep in reports for r in rep.failures()]
    print(f"\n{sum(len(rep.results) for rep in reports)} instances, "
          f"{time.perf_counter() - start:.1f}s")
    assert bad == []
    assert time.perf_counter() - start < 120


def _global_shaped(f):
    for g in subformulas(f):
        if isinstance(g, (Ob, Box)) or (isinstance(g, Neg) and isinstance(g.child, (Ob, Box))):
            yield g


@pytest.mark.acceptance(5, "modal formulas are never mixed: 500 random models x 500 random formulas")
def test_globality():
    rng = random.Random(5)
    atoms = ["p", "q", "r"]
    models = [random_model(rng.randint(1, 5), atoms, rng) for _ in range(500)]
    shaped = []
    prev = random_formula(10, atoms, 49_999)
    for seed in range(500):
        f = random_formula(10, atoms, 50_000 + seed)
        shaped += _global_shaped(f)
        # wrap every formula so each one contributes all four shapes
        shaped += [Ob(f, prev), Box(f), Neg(Ob(prev, f)), Neg(Box(f))]
        prev = f
    shaped = list(dict.fromkeys(shaped))
    mixed = [(m, g) for m in models for g in shaped
             if is_globally_true(m, g) is Globality.MIXED]
    assert mixed == []


def _preorder_oracle(n):
    return {frozenset((i, j) for i in range(n) for j in range(n) if r[i] <= r[j])
            for r in product(range(n), repeat=n)}


@pytest.mark.acceptance(6, "best elements exist for every non-empty set; preorder counts 3 and 13")
def test_semantic_infrastructure():
    empty_best = []
    for n in range(1, 5):
        for m in enumerate_models(n, []):
            for k in range(1, n + 1):
                for xs in combinations(m.worlds, k):
                    if not opt_set(m, xs):
                        empty_best.append((m, xs))
    assert empty_best == []
    for n, expected in ((2, 3), (3, 13)):
        assert len(preorders(n)) == len(_preorder_oracle(n)) == expected


@pytest.mark.acceptance(7, "trace integrity: every step of 100 traces is sound and cited")
def test_trace_integrity():
    allowed = set(CITATIONS.values())
    bad = []
    for seed in range(100):
        f = random_formula(10, ["p", "q", "r"], 70_000 + seed)
        _, trace = normalize(f)
        for step in trace.steps:
            if step.citation not in allowed or CITATIONS[step.rule] != step.citation:
                bad.append((f, step, "citation"))
            elif not confirmed(step.before, step.after, 3):
                bad.append((f, step, "unsound"))
    assert bad == []
