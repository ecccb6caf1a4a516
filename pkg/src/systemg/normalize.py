"""Constructive normalisation into unnested disjunctive normal form.

The normaliser works bottom-up over the formula.  Propositional subformulas
are already in normal form; disjunctions concatenate their disjuncts;
negations are pushed through the canonical conjunctions and distributed;
``[]a`` becomes ``O(false | ~a)``; and an obligation whose arguments contain
prenexes has them pulled out one at a time, antecedent first.  Pulling a
prenex ``Oh`` out of ``O(x | pi \\/ (lam /\\ Oh))`` is sound because ``Oh``
is true at every world or at none, so it can be case-split on.  Within
each branch the other occurrences of ``Oh`` are fixed as well, so the
branching grows with the number of distinct prenexes, not occurrences.

Every rewrite is logged as a :class:`RewriteStep` whose ``before`` and
``after`` are the rewritten subformula, not the whole formula.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Literal

from .syntax import (BOT, TOP, Atom, Box, CanonicalConjunction, Formula, Neg, Ob,
                     Or, Top, UdnfFormula, _as_conj, atoms_of, conj,
                     is_propositional, modal_depth, render, size, subformulas)

__all__ = [
    "Rule", "CITATIONS", "RewriteStep", "RewriteTrace", "NodeLimitExceeded",
    "DEFAULT_NODE_LIMIT", "eliminate_box", "extract_prenex", "pull_prenex",
    "to_propositional_dnf", "simplify", "normalize",
]

DEFAULT_NODE_LIMIT = 100_000

CC = CanonicalConjunction


class Rule(str, enum.Enum):
    BOX_ELIM = "BoxElim"
    PRENEX_EXTRACT = "PrenexExtract"
    PULL_ANTECEDENT_POS = "PullAntecedentPos"
    PULL_ANTECEDENT_NEG = "PullAntecedentNeg"
    PULL_CONSEQUENT_POS = "PullConsequentPos"
    PULL_CONSEQUENT_NEG = "PullConsequentNeg"
    DISTRIBUTE = "Distribute"
    NEGATE_PUSH = "NegatePush"
    FOLD = "Fold"

    def __str__(self) -> str:
        return self.value


CITATIONS: dict[Rule, str] = {
    Rule.BOX_ELIM: "Prop. 1",
    Rule.PRENEX_EXTRACT: "Lemma 1",
    Rule.PULL_ANTECEDENT_POS: "Lemma 2 (8)",
    Rule.PULL_ANTECEDENT_NEG: "Lemma 2 (9)",
    Rule.PULL_CONSEQUENT_POS: "Lemma 2 (10)",
    Rule.PULL_CONSEQUENT_NEG: "Lemma 2 (11)",
    Rule.NEGATE_PUSH: "Theorem 1 case 2",
    Rule.DISTRIBUTE: "Theorem 1 case 2",
    Rule.FOLD: "Def. 5",
}

_PULL_RULES = {
    ("antecedent", "positive"): Rule.PULL_ANTECEDENT_POS,
    ("antecedent", "negative"): Rule.PULL_ANTECEDENT_NEG,
    ("consequent", "positive"): Rule.PULL_CONSEQUENT_POS,
    ("consequent", "negative"): Rule.PULL_CONSEQUENT_NEG,
}

Position = Literal["antecedent", "consequent"]
Sign = Literal["positive", "negative"]


@dataclass(frozen=True)
class RewriteStep:
    rule: Rule
    before: Formula
    after: Formula
    citation: str

    def line(self) -> str:
        return (f"{self.rule} | {self.citation} | "
                f"{render(self.before, resugar=True)} => {render(self.after, resugar=True)}")


@dataclass
class RewriteTrace:
    input: Formula
    steps: list[RewriteStep] = field(default_factory=list)
    output: UdnfFormula | None = None

    def lines(self) -> list[str]:
        return [s.line() for s in self.steps]

    def __str__(self) -> str:
        return "\n".join(self.lines())


class NodeLimitExceeded(RuntimeError):
    """Normalisation grew past the node limit; ``trace`` holds the steps so far."""

    def __init__(self, message: str, trace: RewriteTrace):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------------------
# Building blocks

def eliminate_box(f: Formula) -> Formula:
    """Replace every ``[]a`` by ``O(false | ~a)``, innermost first."""
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Neg):
        return Neg(eliminate_box(f.child))
    if isinstance(f, Or):
        return Or(eliminate_box(f.left), eliminate_box(f.right))
    if isinstance(f, Ob):
        return Ob(eliminate_box(f.consequent), eliminate_box(f.antecedent))
    if isinstance(f, Box):
        return Ob(BOT, Neg(eliminate_box(f.child)))
    raise TypeError(f"not a formula: {f!r}")


def _prenex_target(target: Formula) -> tuple[tuple[Formula, Formula], bool]:
    if isinstance(target, Ob):
        return (target.consequent, target.antecedent), True
    if isinstance(target, Neg) and isinstance(target.child, Ob):
        return (target.child.consequent, target.child.antecedent), False
    raise ValueError(f"not a prenex or negated prenex: {render(target)}")


def extract_prenex(u: UdnfFormula, target: Formula) -> tuple[UdnfFormula, UdnfFormula, Formula]:
    """Split ``u`` as ``pi \\/ (lam /\\ sigma)`` around the first disjunct
    containing ``target`` (a prenex, or a negated prenex).

    ``pi`` is the remaining disjuncts, or ``false`` when there are none;
    ``lam`` the remaining conjuncts of that disjunct (``true`` if none).
    """
    pair, positive = _prenex_target(target)
    for i, d in enumerate(u.disjuncts):
        pool = d.positives if positive else d.negatives
        if pair not in pool:
            continue
        rest = list(pool)
        rest.remove(pair)
        if positive:
            lam = CC(d.alpha, tuple(rest), d.negatives)
        else:
            lam = CC(d.alpha, d.positives, tuple(rest))
        others = u.disjuncts[:i] + u.disjuncts[i + 1:]
        pi = UdnfFormula(others) if others else UdnfFormula.bottom()
        return pi, UdnfFormula((lam,)), target
    raise ValueError(f"{render(target, resugar=True)} does not occur as a conjunct of {u}")


def pull_prenex(position: Position, sign: Sign, other: Formula, pi: Formula,
                lam: Formula, ohat: Formula) -> Formula:
    """Right-hand side of the prenex-pulling equivalence.

    For ``position="antecedent"`` the left-hand side is
    ``O(other | pi \\/ (lam /\\ s))`` and for ``"consequent"`` it is
    ``O(pi \\/ (lam /\\ s) | other)``, where ``s`` is ``ohat`` or, with a
    negative sign, ``~ohat``.  The result is
    ``(s /\\ O(.. pi \\/ lam ..)) \\/ (~s /\\ O(.. pi ..))``.
    """
    if not isinstance(ohat, Ob):
        raise ValueError(f"expected an obligation, got {render(ohat)}")
    if not (is_propositional(ohat.consequent) and is_propositional(ohat.antecedent)):
        raise ValueError(f"prenex arguments must be propositional: {render(ohat, resugar=True)}")
    if sign == "positive":
        kept, dropped = ohat, Neg(ohat)
    elif sign == "negative":
        kept, dropped = Neg(ohat), ohat
    else:
        raise ValueError(f"unknown sign {sign!r}")
    if position == "antecedent":
        wide, narrow = Ob(other, Or(pi, lam)), Ob(other, pi)
    elif position == "consequent":
        wide, narrow = Ob(Or(pi, lam), other), Ob(pi, other)
    else:
        raise ValueError(f"unknown position {position!r}")
    return Or(conj(kept, wide), conj(dropped, narrow))


# ---------------------------------------------------------------------------
# Simplification

def _prop_atoms_value(f: Formula, env: dict[str, bool]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Atom):
        return env[f.name]
    if isinstance(f, Neg):
        return not _prop_atoms_value(f.child, env)
    if isinstance(f, Or):
        return _prop_atoms_value(f.left, env) or _prop_atoms_value(f.right, env)
    raise ValueError(f"not propositional: {render(f)}")


def _truth_table(f: Formula) -> set[bool]:
    atoms = sorted(atoms_of(f))
    values = set()
    for bits in product((False, True), repeat=len(atoms)):
        values.add(_prop_atoms_value(f, dict(zip(atoms, bits))))
        if len(values) == 2:
            break
    return values


def _clean(f: Formula) -> Formula:
    """Identity/annihilator laws for true/false, idempotence and ~~a = a."""
    pair = _as_conj(f)
    if pair is not None:
        a, b = _clean(pair[0]), _clean(pair[1])
        if a == BOT or b == BOT:
            return BOT
        if a == TOP or a == b:
            return b
        if b == TOP:
            return a
        return conj(a, b)
    if isinstance(f, Neg):
        c = _clean(f.child)
        return c.child if isinstance(c, Neg) else Neg(c)
    if isinstance(f, Or):
        a, b = _clean(f.left), _clean(f.right)
        if a == TOP or b == TOP:
            return TOP
        if a == BOT or a == b:
            return b
        if b == BOT:
            return a
        return Or(a, b)
    return f


@lru_cache(maxsize=1 << 14)
def _canonical_arg(f: Formula) -> Formula:
    f = _clean(f)
    values = _truth_table(f)
    if values == {True}:
        return TOP
    if values == {False}:
        return BOT
    return f


@lru_cache(maxsize=1 << 14)
def _valid_prenex(pair: tuple[Formula, Formula]) -> bool:
    # The best antecedent-worlds are antecedent-worlds, so O(c | a) holds
    # everywhere once a -> c is a tautology.
    c, a = pair
    return _truth_table(Or(Neg(a), c)) == {True}


def _dedupe(items):
    return tuple(dict.fromkeys(items))


def _simplify_disjunct(d: CanonicalConjunction) -> CanonicalConjunction | None:
    """Clean one canonical conjunction; ``None`` if it is unsatisfiable."""
    alpha = _canonical_arg(d.alpha)
    if alpha == BOT:
        return None
    neg = _dedupe((_canonical_arg(c), _canonical_arg(a)) for c, a in d.negatives)
    if any(_valid_prenex(pair) for pair in neg):
        return None
    pos = _dedupe(pair for pair in ((_canonical_arg(c), _canonical_arg(a))
                                    for c, a in d.positives)
                  if not _valid_prenex(pair))
    if set(pos) & set(neg):
        return None
    return CC(alpha, pos, neg)


def _subsumes(a: CanonicalConjunction, b: CanonicalConjunction) -> bool:
    """``b`` implies ``a`` by containing all of its conjuncts."""
    return ((a.alpha == TOP or a.alpha == b.alpha)
            and set(a.positives) <= set(b.positives)
            and set(a.negatives) <= set(b.negatives))


# Absorption is quadratic in the number of disjuncts; skip it beyond this.
ABSORPTION_MAX = 2000


def simplify(u: UdnfFormula) -> UdnfFormula:
    """Equivalence-preserving cleanup of a UDNF formula.

    Folds ``true``/``false`` in the propositional parts and prenex
    arguments, drops prenexes that hold in every model (antecedent entails
    consequent) and removes duplicate conjuncts.  A disjunct is dropped
    when its propositional part is unsatisfiable, when it negates such a
    valid prenex, when it has a prenex both positively and negatively, or
    when another disjunct's conjuncts are a subset of its own.
    """
    out: list[CanonicalConjunction] = []
    for d in u.disjuncts:
        cc = _simplify_disjunct(d)
        if cc is None:
            continue
        if cc.is_propositional() and cc.alpha == TOP:
            return UdnfFormula.of(TOP)
        if cc not in out:
            out.append(cc)
    if len(out) <= ABSORPTION_MAX:
        out = [b for j, b in enumerate(out)
               if not any(i != j and _subsumes(a, b) for i, a in enumerate(out))]
    return UdnfFormula(tuple(out)) if out else UdnfFormula.bottom()


# ---------------------------------------------------------------------------
# Normalisation

def _and_alpha(a: Formula, b: Formula) -> Formula:
    if a == TOP or a == b:
        return b
    if b == TOP:
        return a
    return conj(a, b)


def _merge(a: CanonicalConjunction, b: CanonicalConjunction) -> CanonicalConjunction:
    return CC(_and_alpha(a.alpha, b.alpha),
              _dedupe(a.positives + b.positives),
              _dedupe(a.negatives + b.negatives))


def _negate_alpha(alpha: Formula) -> list[Formula]:
    """Negation of a propositional part, split at its top-level disjunctions."""
    out, stack = [], [alpha.child if isinstance(alpha, Neg) else Neg(alpha)]
    while stack:
        f = stack.pop()
        if isinstance(f, Or):
            stack += [f.right, f.left]
        else:
            out.append(f)
    return out


def _fold(parts: list[Formula], op) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = op(out, p)
    return out


def _first_prenex(u: UdnfFormula) -> Formula | None:
    for d in u.disjuncts:
        if d.positives:
            return Ob(*d.positives[0])
        if d.negatives:
            return Neg(Ob(*d.negatives[0]))
    return None


def _concat(*us: UdnfFormula) -> UdnfFormula:
    return UdnfFormula(tuple(d for u in us for d in u.disjuncts))


def _with_literal(u: UdnfFormula, pair, positive: bool) -> list[CanonicalConjunction]:
    lit = CC(TOP, (pair,), ()) if positive else CC(TOP, (), (pair,))
    return [_merge(d, lit) for d in u.disjuncts]


def _assume(u: UdnfFormula, pair, value: bool) -> UdnfFormula:
    """Fix the truth value of the prenex ``pair`` throughout ``u``.

    Prenexes are global, so inside a conjunction that asserts (or denies)
    one, its other occurrences can be replaced by ``true`` or ``false``.
    """
    out = []
    for d in u.disjuncts:
        if pair in (d.negatives if value else d.positives):
            continue
        out.append(CC(d.alpha, tuple(x for x in d.positives if x != pair),
                      tuple(x for x in d.negatives if x != pair)))
    return UdnfFormula(tuple(out)) if out else UdnfFormula.bottom()


class _Normalizer:
    def __init__(self, source: Formula, node_limit: int, simplify: bool):
        self.trace = RewriteTrace(source)
        self.node_limit = node_limit
        self.simplify = simplify
        # the same (consequent, antecedent) pair recurs across pull branches
        self._memo: dict[tuple[UdnfFormula, UdnfFormula], UdnfFormula] = {}

    def limit_error(self, what: str, n: int) -> NodeLimitExceeded:
        return NodeLimitExceeded(
            f"{what} needs {n} nodes, above the limit of {self.node_limit}", self.trace)

    def record(self, rule: Rule, before: Formula, after: Formula) -> None:
        if before == after:
            return
        self.trace.steps.append(RewriteStep(rule, before, after, CITATIONS[rule]))
        n = size(after)
        if n > self.node_limit:
            raise self.limit_error(f"{rule} step", n)

    def fold(self, u: UdnfFormula) -> UdnfFormula:
        if not self.simplify:
            return u
        s = simplify(u)
        self.record(Rule.FOLD, u.to_formula(), s.to_formula())
        return s

    def run(self, f: Formula) -> UdnfFormula:
        if is_propositional(f):
            return UdnfFormula.of(f)
        if isinstance(f, Or):
            return _concat(self.run(f.left), self.run(f.right))
        if isinstance(f, Neg):
            return self.negate(self.run(f.child))
        if isinstance(f, Ob):
            return self.obligation(self.run(f.consequent), self.run(f.antecedent))
        if isinstance(f, Box):
            rewritten = Ob(BOT, Neg(f.child))
            self.record(Rule.BOX_ELIM, f, rewritten)
            return self.run(rewritten)
        raise TypeError(f"not a formula: {f!r}")

    def negate(self, u: UdnfFormula) -> UdnfFormula:
        factors = []
        for d in u.disjuncts:
            lits = []
            if d.alpha != TOP:
                lits += [CC(a) for a in _negate_alpha(d.alpha)]
            lits += [CC(TOP, (), (pair,)) for pair in d.positives]
            lits += [CC(TOP, (pair,), ()) for pair in d.negatives]
            factors.append(lits or [CC(BOT)])
        pushed = _fold([_fold([c.to_formula() for c in lits], Or) for lits in factors], conj)
        self.record(Rule.NEGATE_PUSH, Neg(u.to_formula()), pushed)

        acc = [CC(TOP)]
        for lits in factors:
            acc = [_merge(a, b) for a in acc for b in lits]
            if self.simplify:
                acc = [c for c in _dedupe(_simplify_disjunct(c) for c in acc) if c is not None]
            if len(acc) > self.node_limit:
                raise self.limit_error("distribution", len(acc))
        result = UdnfFormula(tuple(acc)) if acc else UdnfFormula.bottom()
        self.record(Rule.DISTRIBUTE, pushed, result.to_formula())
        return self.fold(result)

    def obligation(self, uc: UdnfFormula, ua: UdnfFormula) -> UdnfFormula:
        key = (uc, ua)
        if key not in self._memo:
            self._memo[key] = self._obligation(uc, ua)
        return self._memo[key]

    def _obligation(self, uc: UdnfFormula, ua: UdnfFormula) -> UdnfFormula:
        target = _first_prenex(ua)
        position: Position = "antecedent"
        if target is None:
            target = _first_prenex(uc)
            position = "consequent"
        cons, ante = uc.to_formula(), ua.to_formula()
        if target is None:
            return UdnfFormula((CC(TOP, ((cons, ante),), ()),))

        host = ua if position == "antecedent" else uc
        other = cons if position == "antecedent" else ante
        pi, lam, sigma = extract_prenex(host, target)
        positive = isinstance(sigma, Ob)
        ohat = sigma if positive else sigma.child
        pi_f, lam_f = pi.to_formula(), lam.to_formula()
        split = Or(pi_f, conj(lam_f, sigma))
        if position == "antecedent":
            self.record(Rule.PRENEX_EXTRACT, Ob(cons, ante), Ob(other, split))
            extracted = Ob(other, split)
        else:
            self.record(Rule.PRENEX_EXTRACT, Ob(cons, ante), Ob(split, other))
            extracted = Ob(split, other)

        sign: Sign = "positive" if positive else "negative"
        pulled = pull_prenex(position, sign, other, pi_f, lam_f, ohat)
        self.record(_PULL_RULES[position, sign], extracted, pulled)

        # Resolve the other occurrences of the pulled prenex in each branch.
        pair = (ohat.consequent, ohat.antecedent)
        kept, dropped = (ohat, Neg(ohat)) if positive else (Neg(ohat), ohat)
        wide, narrow = _concat(pi, lam), pi
        if position == "antecedent":
            cw, aw = _assume(uc, pair, positive), _assume(wide, pair, positive)
            cn, an = _assume(uc, pair, not positive), _assume(narrow, pair, not positive)
        else:
            cw, aw = _assume(wide, pair, positive), _assume(ua, pair, positive)
            cn, an = _assume(narrow, pair, not positive), _assume(ua, pair, not positive)
        self.record(Rule.FOLD, pulled,
                    Or(conj(kept, Ob(cw.to_formula(), aw.to_formula())),
                       conj(dropped, Ob(cn.to_formula(), an.to_formula()))))
        r_wide, r_narrow = self.obligation(cw, aw), self.obligation(cn, an)

        pair = (ohat.consequent, ohat.antecedent)
        result = UdnfFormula(tuple(_with_literal(r_wide, pair, positive)
                                   + _with_literal(r_narrow, pair, not positive)))
        self.record(Rule.DISTRIBUTE,
                    Or(conj(kept, r_wide.to_formula()), conj(dropped, r_narrow.to_formula())),
                    result.to_formula())
        return self.fold(result)


def to_propositional_dnf(f: Formula) -> UdnfFormula:
    """Push negations inward and distribute, for a formula whose only modal
    subformulas are prenexes (obligations over propositional arguments)."""
    if modal_depth(f) > 1:
        raise ValueError(f"modal operator nested inside another: {render(f, resugar=True)}")
    if any(isinstance(g, Box) for g in subformulas(f)):
        raise ValueError("universal modality present; eliminate it first")
    return _Normalizer(f, DEFAULT_NODE_LIMIT, simplify=False).run(f)


def normalize(f: Formula, node_limit: int = DEFAULT_NODE_LIMIT,
              simplify: bool = True) -> tuple[UdnfFormula, RewriteTrace]:
    """Compute an equivalent UDNF formula together with its rewrite trace.

    Raises :class:`NodeLimitExceeded` (carrying the partial trace) if an
    intermediate result grows beyond ``node_limit`` nodes.
    """
    if node_limit < 1:
        raise ValueError("node_limit must be positive")
    worker = _Normalizer(f, node_limit, simplify)
    result = worker.fold(worker.run(f))
    steps = worker.trace.steps
    if steps and steps[-1].after != result.to_formula():
        # Disjunctions are concatenated without a recorded step; close the
        # trace on the whole formula so it ends at the output.
        steps.append(RewriteStep(Rule.FOLD, result.to_formula(), result.to_formula(),
                                 CITATIONS[Rule.FOLD]))
    worker.trace.output = result
    return result, worker.trace
