"""Small-model enumeration, random formulas, bounded equivalence checking
and the axiom-schema soundness suite.

Everything here is a falsifier: when no counterexample is found the answer
is "none up to the bound", never a validity claim.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

import numpy as np

from .modelspace import MAX_WORLDS, model_spaces, preorders, valuation_of, world_names
from .semantics import Model
from .syntax import (TOP, Atom, Box, Formula, Neg, Ob, Or, atoms_of, parse, render,
                     subformulas, substitute)

__all__ = [
    "enumerate_models", "count_models", "random_model", "random_formula",
    "all_formulas", "Counterexample", "Confirmation", "check_equivalence",
    "check_validity", "Schema", "SCHEMAS", "METAVARIABLES", "PROPOSITIONAL_POOL",
    "SchemaResult", "SchemaReport", "schema_suite", "instantiate",
]


def _guard(n: int) -> None:
    if not 1 <= n <= MAX_WORLDS:
        raise ValueError(f"number of worlds must be in 1..{MAX_WORLDS}, got {n}")


def enumerate_models(n_worlds: int, atoms: Iterable[str]) -> Iterator[Model]:
    """Yield every model with exactly ``n_worlds`` worlds over ``atoms``.

    Each total preorder is produced once (as a rank map onto ``0..k-1``),
    combined with every valuation.  World permutations are not quotiented.
    """
    _guard(n_worlds)
    atoms = tuple(sorted(atoms))
    names = world_names(n_worlds)
    for ranks in preorders(n_worlds):
        rank = dict(zip(names, ranks))
        for index in range(1 << (n_worlds * len(atoms))):
            masks = valuation_of(index, n_worlds, atoms)
            yield Model(names, rank, {
                a: frozenset(names[i] for i in range(n_worlds) if m >> i & 1)
                for a, m in masks.items()})


def count_models(n_worlds: int, atoms: Iterable[str]) -> int:
    _guard(n_worlds)
    return len(preorders(n_worlds)) << (n_worlds * len(set(atoms)))


def random_model(n_worlds: int, atoms: Iterable[str], rng: random.Random) -> Model:
    names = world_names(n_worlds)
    rank = {w: rng.randrange(n_worlds) for w in names}
    valuation = {a: frozenset(w for w in names if rng.random() < 0.5) for a in sorted(atoms)}
    return Model(names, rank, valuation)


def random_formula(max_nodes: int, atoms: Iterable[str], seed: int,
                   modal: bool = True) -> Formula:
    """A random core formula with at most ``max_nodes`` nodes.

    The size is drawn uniformly from ``1..max_nodes`` and the tree is grown
    to exactly that size.  With ``modal=False`` only atoms, ``true``,
    negation and disjunction are used.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be positive")
    rng = random.Random(seed)
    leaves = [Atom(a) for a in sorted(atoms)] + [TOP]

    def grow(k: int) -> Formula:
        if k == 1:
            return rng.choice(leaves)
        ops = ["neg", "box"] if k == 2 else ["neg", "box", "or", "ob"]
        if not modal:
            ops = [op for op in ops if op in ("neg", "or")]
        op = rng.choice(ops)
        if op == "neg":
            return Neg(grow(k - 1))
        if op == "box":
            return Box(grow(k - 1))
        left = rng.randint(1, k - 2)
        a, b = grow(left), grow(k - 1 - left)
        return Or(a, b) if op == "or" else Ob(a, b)

    return grow(rng.randint(1, max_nodes))


def all_formulas(max_nodes: int, atoms: Iterable[str]) -> list[Formula]:
    """Every core formula with at most ``max_nodes`` nodes, smallest first."""
    by_size: dict[int, list[Formula]] = {1: [Atom(a) for a in sorted(atoms)] + [TOP]}
    for k in range(2, max_nodes + 1):
        level = [Neg(f) for f in by_size[k - 1]] + [Box(f) for f in by_size[k - 1]]
        for i in range(1, k - 1):
            for a in by_size[i]:
                for b in by_size[k - 1 - i]:
                    level.append(Or(a, b))
                    level.append(Ob(a, b))
        by_size[k] = level
    return [f for k in range(1, max_nodes + 1) for f in by_size[k]]


# ---------------------------------------------------------------------------
# Bounded equivalence checking

@dataclass(frozen=True)
class Counterexample:
    """A model and world where the two formulas under test disagree."""

    model: Model
    world: str
    left_value: bool
    right_value: bool

    def to_dict(self) -> dict:
        return {"model": self.model.to_dict(), "world": self.world,
                "left": self.left_value, "right": self.right_value}

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class Confirmation:
    max_worlds: int
    models_checked: int

    @property
    def label(self) -> str:
        return (f"no counterexample up to {self.max_worlds} world(s) "
                f"({self.models_checked} models checked)")

    def __bool__(self) -> bool:
        return True

    def __str__(self) -> str:
        return self.label


def _first_difference(space, left: np.ndarray, right: np.ndarray) -> Counterexample | None:
    diff = left ^ right
    rows = np.flatnonzero(diff)
    if rows.size == 0:
        return None
    row = int(rows[0])
    d = int(diff[row])
    bit = (d & -d).bit_length() - 1
    return Counterexample(
        model=space.model(space.start + row),
        world=world_names(space.n)[bit],
        left_value=bool(int(left[row]) >> bit & 1),
        right_value=bool(int(right[row]) >> bit & 1),
    )


def check_equivalence(f: Formula, g: Formula, max_worlds: int) -> Counterexample | Confirmation:
    """Search all models with ``1..max_worlds`` worlds for a point where
    ``f`` and ``g`` differ; the first one found (in enumeration order) is
    returned."""
    _guard(max_worlds)
    atoms = sorted(atoms_of(f) | atoms_of(g))
    checked = 0
    for n in range(1, max_worlds + 1):
        for space in model_spaces(n, atoms):
            memo: dict = {}
            cex = _first_difference(space, space.evaluate(f, memo), space.evaluate(g, memo))
            if cex is not None:
                return cex
            checked += len(space)
    return Confirmation(max_worlds, checked)


def check_validity(f: Formula, max_worlds: int) -> Counterexample | Confirmation:
    """Bounded search for a point falsifying ``f``."""
    return check_equivalence(f, TOP, max_worlds)


# ---------------------------------------------------------------------------
# Schema suite

METAVARIABLES = frozenset({
    "phi", "phi1", "phi2", "psi", "psi1", "psi2", "chi",
    "alpha", "beta", "pi", "lam", "phi_h", "psi_h",
})
# Fresh object atoms for atomic instantiation; disjoint from METAVARIABLES.
OBJECT_ATOMS = ("p", "q", "r", "s", "t", "u", "v")

PROPOSITIONAL_POOL: tuple[Formula, ...] = tuple(
    parse(s) for s in ("p", "~p", "p \\/ q", "p /\\ q", "true", "false"))


@dataclass(frozen=True)
class Schema:
    name: str
    template: Formula
    source: str  # "axiom", "equivalence" or "derived"

    def __post_init__(self):
        stray = atoms_of(self.template) - METAVARIABLES
        if stray:
            raise ValueError(f"schema {self.name} uses non-metavariable atoms {sorted(stray)}")

    @property
    def metavariables(self) -> list[str]:
        """Metavariables in order of first occurrence."""
        seen: list[str] = []
        for g in subformulas(self.template):
            if isinstance(g, Atom) and g.name not in seen:
                seen.append(g.name)
        return seen


_OH = "O(phi_h | psi_h)"

_SCHEMA_TEXT = [
    # propositional tautologies
    ("PL-lem", "phi \\/ ~phi", "axiom"),
    ("PL-k", "phi -> (psi -> phi)", "axiom"),
    ("PL-s", "(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))", "axiom"),
    ("PL-contra", "(~psi -> ~phi) -> (phi -> psi)", "axiom"),
    # S5 for the universal modality
    ("S5-K", "[](phi -> psi) -> ([]phi -> []psi)", "axiom"),
    ("S5-T", "[]phi -> phi", "axiom"),
    ("S5-4", "[]phi -> [][]phi", "axiom"),
    ("S5-5", "<>phi -> []<>phi", "axiom"),
    ("S5-Dual", "<>phi <-> ~[]~phi", "axiom"),
    # dyadic obligation
    ("DfP", "P(phi | psi) <-> ~O(~phi | psi)", "axiom"),
    ("COK", "O(phi1 -> phi2 | psi) -> (O(phi1 | psi) -> O(phi2 | psi))", "axiom"),
    ("Abs", "O(phi | psi) -> []O(phi | psi)", "axiom"),
    ("CON", "[]phi -> O(phi | psi)", "axiom"),
    ("Ext", "[](psi1 <-> psi2) -> (O(phi | psi1) <-> O(phi | psi2))", "axiom"),
    ("Id", "O(phi | phi)", "axiom"),
    ("C", "O(phi | psi /\\ chi) -> O(chi -> phi | psi)", "axiom"),
    ("D*", "<>psi -> (O(phi | psi) -> P(phi | psi))", "axiom"),
    ("S", "P(phi | psi) /\\ O(phi -> chi | psi) -> O(chi | phi /\\ psi)", "axiom"),
    # equivalences used by the normaliser
    ("box-def", "[]phi <-> O(false | ~phi)", "equivalence"),
    ("pull-antecedent+",
     f"O(phi | pi \\/ (lam /\\ {_OH})) <-> "
     f"({_OH} /\\ O(phi | pi \\/ lam)) \\/ (~{_OH} /\\ O(phi | pi))", "equivalence"),
    ("pull-antecedent-",
     f"O(phi | pi \\/ (lam /\\ ~{_OH})) <-> "
     f"(~{_OH} /\\ O(phi | pi \\/ lam)) \\/ ({_OH} /\\ O(phi | pi))", "equivalence"),
    ("pull-consequent+",
     f"O(pi \\/ (lam /\\ {_OH}) | psi) <-> "
     f"({_OH} /\\ O(pi \\/ lam | psi)) \\/ (~{_OH} /\\ O(pi | psi))", "equivalence"),
    ("pull-consequent-",
     f"O(pi \\/ (lam /\\ ~{_OH}) | psi) <-> "
     f"(~{_OH} /\\ O(pi \\/ lam | psi)) \\/ ({_OH} /\\ O(pi | psi))", "equivalence"),
    # generalised extensionality / closure under consequence
    ("gExt", "[](alpha <-> beta) -> "
             "(O(phi | pi \\/ (lam /\\ alpha)) <-> O(phi | pi \\/ (lam /\\ beta)))", "derived"),
    ("gExt+", f"[]{_OH} -> (O(phi | pi \\/ (lam /\\ {_OH})) <-> O(phi | pi \\/ lam))", "derived"),
    ("gExt-", f"[]~{_OH} -> (O(phi | pi \\/ (lam /\\ {_OH})) <-> O(phi | pi))", "derived"),
    ("gCOK", "[](alpha <-> beta) -> "
             "(O(pi \\/ (lam /\\ alpha) | psi) -> O(pi \\/ (lam /\\ beta) | psi))", "derived"),
    ("gCOK+", f"[]{_OH} -> (O(pi \\/ (lam /\\ {_OH}) | psi) -> O(pi \\/ lam | psi))", "derived"),
    ("gCOK-", f"[]~{_OH} -> (O(pi \\/ (lam /\\ {_OH}) | psi) -> O(pi | psi))", "derived"),
]

SCHEMAS: tuple[Schema, ...] = tuple(Schema(n, parse(t), s) for n, t, s in _SCHEMA_TEXT)


def instantiate(schema: Schema, values: Sequence[Formula]) -> Formula:
    return substitute(schema.template, dict(zip(schema.metavariables, values)))


def _instances(schema: Schema, depth: str, max_instances: int, seed: int) -> list[Formula]:
    mvs = schema.metavariables
    if depth == "atomic":
        return [instantiate(schema, [Atom(a) for a in OBJECT_ATOMS[:len(mvs)]])]
    if depth != "propositional":
        raise ValueError(f"unknown instantiation depth {depth!r}")
    pool = PROPOSITIONAL_POOL
    total = len(pool) ** len(mvs)
    if total <= max_instances:
        choices: Iterable = product(pool, repeat=len(mvs))
    else:
        rng = random.Random(seed)
        picks = sorted(rng.sample(range(total), max_instances))
        choices = [[pool[i // len(pool) ** j % len(pool)] for j in range(len(mvs))]
                   for i in picks]
    return [instantiate(schema, list(c)) for c in choices]


@dataclass
class SchemaResult:
    schema: str
    source: str
    instance: Formula
    models_checked: int
    counterexamples: list[Counterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {"schema": self.schema, "source": self.source,
                "instance": render(self.instance, resugar=True),
                "models_checked": self.models_checked,
                "counterexamples": [{"model": c.model.to_dict(), "world": c.world}
                                    for c in self.counterexamples]}


@dataclass
class SchemaReport:
    max_worlds: int
    depth: str
    results: list[SchemaResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[SchemaResult]:
        return [r for r in self.results if not r.ok]

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps({"max_worlds": self.max_worlds, "depth": self.depth,
                           "results": [r.to_dict() for r in self.results]}, indent=indent)


def _falsify(f: Formula, max_worlds: int, limit: int) -> tuple[int, list[Counterexample]]:
    atoms = sorted(atoms_of(f))
    checked, found = 0, []
    for n in range(1, max_worlds + 1):
        for space in model_spaces(n, atoms):
            values = space.evaluate(f)
            checked += len(space)
            for row in np.flatnonzero(values != space.full)[:limit - len(found)]:
                missing = space.full & ~int(values[row])
                bit = (missing & -missing).bit_length() - 1
                found.append(Counterexample(space.model(space.start + int(row)),
                                            world_names(n)[bit], False, True))
            if len(found) >= limit:
                return checked, found
    return checked, found


def schema_suite(max_worlds: int = 3, instantiation_depth: str = "atomic", *,
                 schemas: Sequence[Schema] = SCHEMAS, max_instances: int = 500,
                 max_counterexamples: int = 3, seed: int = 0) -> SchemaReport:
    """Check every instance of every schema on all models up to ``max_worlds``.

    ``atomic`` instantiates metavariables with distinct fresh atoms;
    ``propositional`` draws them from :data:`PROPOSITIONAL_POOL`, taking
    every combination or, beyond ``max_instances``, a seeded sample.
    """
    _guard(max_worlds)
    results = []
    for schema in schemas:
        for inst in _instances(schema, instantiation_depth, max_instances, seed):
            checked, cexs = _falsify(inst, max_worlds, max_counterexamples)
            results.append(SchemaResult(schema.name, schema.source, inst, checked, cexs))
    return SchemaReport(max_worlds, instantiation_depth, results)
