"""Formula AST for System G, the concrete grammar, and structural utilities.

The core language has exactly six constructors: atoms, ``Top``, negation,
disjunction, dyadic obligation ``O(consequent | antecedent)`` and the
universal modality ``[]``.  Conjunction, implication, the biconditional,
``false``, permission ``P(a | b)`` and ``<>`` only exist in the concrete
syntax; the parser desugars them and :func:`render` can optionally sugar
them back.

Grammar (whitespace insignificant)::

    iff     := imp ('<->' imp)*            left associative
    imp     := or ('->' imp)?              right associative
    or      := and ('\\/' and)*             left associative
    and     := unary ('/\\' unary)*         left associative
    unary   := ('~' | '[]' | '<>') unary | primary
    primary := atom | 'true' | 'false'
             | 'O' '(' iff '|' iff ')' | 'P' '(' iff '|' iff ')'
             | '(' iff ')'
    atom    := [a-z][a-z0-9_]*  (except the keywords true/false)
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

__all__ = [
    "Formula", "Atom", "Top", "Neg", "Or", "Ob", "Box", "TOP", "BOT",
    "conj", "disj", "implies", "iff", "perm", "dia",
    "ParseError", "parse", "render", "modal_depth", "atoms_of", "size",
    "subformulas", "is_propositional", "substitute",
    "CanonicalConjunction", "UdnfFormula", "ShapeFailure", "udnf_shape",
]


class Formula:
    """Base class of the immutable formula AST.

    Hashes are computed once and cached, so formulas are cheap to use as
    dictionary keys even when deeply nested.
    """

    def _parts(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__match_args__)

    def __post_init__(self):
        # Children are already hashed, so hashing at construction never
        # recurses, however deep the tree.
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._parts()))

    def __hash__(self) -> int:
        return self.__dict__["_hash"]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Formula):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b) or a._hash != b._hash:
                return False
            for x, y in zip(a._parts(), b._parts()):
                if isinstance(x, Formula):
                    stack.append((x, y))
                elif x != y:
                    return False
        return True

    def __invert__(self) -> "Formula":
        return Neg(self)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __and__(self, other: "Formula") -> "Formula":
        return conj(self, other)

    def __str__(self) -> str:
        return render(self, resugar=True)


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not _ATOM_RE.fullmatch(self.name) or self.name in KEYWORDS:
            raise ValueError(f"invalid atom name {self.name!r}")
        super().__post_init__()


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Neg(Formula):
    child: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Ob(Formula):
    """``O(consequent | antecedent)``: the consequent is obligatory given the antecedent."""

    consequent: Formula
    antecedent: Formula


@dataclass(frozen=True, eq=False)
class Box(Formula):
    child: Formula


TOP = Top()
BOT = Neg(TOP)


# Derived connectives, desugared into the core constructors.

def conj(a: Formula, b: Formula) -> Formula:
    return Neg(Or(Neg(a), Neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    return Or(a, b)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def perm(consequent: Formula, antecedent: Formula) -> Formula:
    return Neg(Ob(Neg(consequent), antecedent))


def dia(a: Formula) -> Formula:
    return Neg(Box(Neg(a)))


def _as_conj(f: Formula) -> tuple[Formula, Formula] | None:
    if (isinstance(f, Neg) and isinstance(f.child, Or)
            and isinstance(f.child.left, Neg) and isinstance(f.child.right, Neg)):
        return f.child.left.child, f.child.right.child
    return None


# ---------------------------------------------------------------------------
# Parsing

KEYWORDS = frozenset({"true", "false"})
_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*")
_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<op><->|->|<>|\[\]|/\\|\\/|~|\(|\)|\|)"
    r"|(?P<ident>[a-z][a-z0-9_]*)|(?P<modal>[OP])(?![A-Za-z0-9_])"
)


class ParseError(ValueError):
    """Malformed formula text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int, text: str):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


@dataclass
class _Token:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str) -> ParseError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        return ParseError(f"{message}, found {found}", tok.pos, self.text)

    def accept(self, value: str) -> bool:
        if self.tok.kind in ("op", "modal") and self.tok.value == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> None:
        if not self.accept(value):
            raise self.error(f"expected {value!r}")

    def parse(self) -> Formula:
        if self.tok.kind == "eof":
            raise ParseError("empty formula", 0, self.text)
        f = self.iff()
        if self.tok.kind != "eof":
            raise self.error("unexpected token")
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.accept("<->"):
            f = iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disjunction()
        if self.accept("->"):
            return implies(f, self.imp())
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.accept("\\/"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.accept("/\\"):
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.accept("~"):
            return Neg(self.unary())
        if self.accept("[]"):
            return Box(self.unary())
        if self.accept("<>"):
            return dia(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.tok
        if tok.kind == "ident":
            self.i += 1
            if tok.value == "true":
                return TOP
            if tok.value == "false":
                return BOT
            return Atom(tok.value)
        if tok.kind == "modal":
            self.i += 1
            self.expect("(")
            first = self.iff()
            self.expect("|")
            second = self.iff()
            self.expect(")")
            if tok.value == "O":
                return Ob(first, second)
            return perm(first, second)
        if self.accept("("):
            f = self.iff()
            self.expect(")")
            return f
        raise self.error("expected a formula")


def parse(text: str) -> Formula:
    """Parse ``text`` into a core formula, desugaring derived connectives.

    >>> parse("P(p | q)")
    Neg(child=Ob(consequent=Neg(child=Atom(name='p')), antecedent=Atom(name='q')))
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Rendering

_IFF, _IMP, _OR, _AND, _UNARY = 1, 2, 3, 4, 5


def render(f: Formula, resugar: bool = False) -> str:
    """Render ``f`` in the concrete grammar with minimal parentheses.

    With ``resugar`` the desugared shapes of ``false``, ``/\\``, ``P`` and
    ``<>`` are printed in their derived form.  Implications are never
    resugared, since ``~a \\/ b`` reads better in normal forms.
    """
    return _render(f, resugar)


@lru_cache(maxsize=65536)
def _render(f: Formula, resugar: bool) -> str:
    return _render_prec(f, resugar)[0]


def _wrap(f: Formula, resugar: bool, min_prec: int) -> str:
    text, prec = _render_prec(f, resugar)
    return text if prec >= min_prec else f"({text})"


def _render_prec(f: Formula, resugar: bool) -> tuple[str, int]:
    if isinstance(f, Atom):
        return f.name, 9
    if isinstance(f, Top):
        return "true", 9
    if isinstance(f, Ob):
        return (f"O({_render(f.consequent, resugar)} | "
                f"{_render(f.antecedent, resugar)})"), 9
    if isinstance(f, Box):
        return "[]" + _wrap(f.child, resugar, _UNARY), _UNARY
    if isinstance(f, Or):
        return (_wrap(f.left, resugar, _OR) + " \\/ "
                + _wrap(f.right, resugar, _OR + 1)), _OR
    if isinstance(f, Neg):
        c = f.child
        if resugar:
            if isinstance(c, Top):
                return "false", 9
            pair = _as_conj(f)
            if pair is not None:
                return (_wrap(pair[0], resugar, _AND) + " /\\ "
                        + _wrap(pair[1], resugar, _AND + 1)), _AND
            if isinstance(c, Ob) and isinstance(c.consequent, Neg):
                return (f"P({_render(c.consequent.child, resugar)} | "
                        f"{_render(c.antecedent, resugar)})"), 9
            if isinstance(c, Box) and isinstance(c.child, Neg):
                return "<>" + _wrap(c.child.child, resugar, _UNARY), _UNARY
        return "~" + _wrap(c, resugar, _UNARY), _UNARY
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Structural utilities

@lru_cache(maxsize=1 << 16)
def modal_depth(f: Formula) -> int:
    if isinstance(f, (Atom, Top)):
        return 0
    if isinstance(f, Neg):
        return modal_depth(f.child)
    if isinstance(f, Or):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Ob):
        return 1 + max(modal_depth(f.consequent), modal_depth(f.antecedent))
    if isinstance(f, Box):
        return 1 + modal_depth(f.child)
    raise TypeError(f"not a formula: {f!r}")


def is_propositional(f: Formula) -> bool:
    return modal_depth(f) == 0


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every subformula occurrence of ``f`` in pre-order."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (Neg, Box)):
            stack.append(g.child)
        elif isinstance(g, Or):
            stack.extend((g.right, g.left))
        elif isinstance(g, Ob):
            stack.extend((g.antecedent, g.consequent))


def atoms_of(f: Formula) -> frozenset[str]:
    """Names of the atoms occurring in ``f``; ``Top`` is not an atom here."""
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return sum(1 for _ in subformulas(f))


def substitute(f: Formula, mapping: dict[str, Formula]) -> Formula:
    """Replace atoms by formulas, simultaneously."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, Top):
        return f
    if isinstance(f, Neg):
        return Neg(substitute(f.child, mapping))
    if isinstance(f, Box):
        return Box(substitute(f.child, mapping))
    if isinstance(f, Or):
        return Or(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Ob):
        return Ob(substitute(f.consequent, mapping), substitute(f.antecedent, mapping))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Unnested disjunctive normal form

Prenex = tuple[Formula, Formula]


def _prenex_key(pair: Prenex) -> str:
    return render(Ob(*pair), resugar=True)


def _sorted_prenexes(pairs) -> tuple[Prenex, ...]:
    return tuple(sorted(pairs, key=_prenex_key))


def _fold_conj(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = conj(out, p)
    return out


@dataclass(frozen=True)
class CanonicalConjunction:
    """A propositional part conjoined with positive and negated prenexes.

    Prenexes are stored as ``(consequent, antecedent)`` pairs of
    propositional formulas and kept sorted by their rendering.
    """

    alpha: Formula = TOP
    positives: tuple[Prenex, ...] = ()
    negatives: tuple[Prenex, ...] = ()

    def __post_init__(self):
        if not is_propositional(self.alpha):
            raise ValueError(f"propositional part has modal depth > 0: {render(self.alpha)}")
        for c, a in self.positives + self.negatives:
            if not (is_propositional(c) and is_propositional(a)):
                raise ValueError(f"prenex arguments must be propositional: {render(Ob(c, a))}")
        object.__setattr__(self, "positives", _sorted_prenexes(self.positives))
        object.__setattr__(self, "negatives", _sorted_prenexes(self.negatives))

    @property
    def prenexes(self) -> list[Formula]:
        """The modal conjuncts, positives first, as formulas."""
        return ([Ob(c, a) for c, a in self.positives]
                + [Neg(Ob(c, a)) for c, a in self.negatives])

    def is_propositional(self) -> bool:
        return not (self.positives or self.negatives)

    def to_formula(self) -> Formula:
        """Conjunction ``alpha /\\ O(..) /\\ .. /\\ ~O(..)``; a ``true`` alpha is
        omitted when there is at least one prenex."""
        parts = self.prenexes
        if not parts or self.alpha != TOP:
            parts.insert(0, self.alpha)
        return _fold_conj(parts)


@dataclass(frozen=True)
class UdnfFormula:
    """A non-empty disjunction of canonical conjunctions."""

    disjuncts: tuple[CanonicalConjunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))
        if not self.disjuncts:
            raise ValueError("a UDNF formula needs at least one disjunct")

    @classmethod
    def bottom(cls) -> "UdnfFormula":
        """The empty disjunction, represented as a single ``false`` disjunct."""
        return cls((CanonicalConjunction(BOT),))

    @classmethod
    def of(cls, f: Formula) -> "UdnfFormula":
        """Wrap a propositional formula as a one-disjunct UDNF."""
        return cls((CanonicalConjunction(f),))

    def has_prenex(self) -> bool:
        return any(not d.is_propositional() for d in self.disjuncts)

    def to_formula(self) -> Formula:
        out = self.disjuncts[0].to_formula()
        for d in self.disjuncts[1:]:
            out = Or(out, d.to_formula())
        return out

    def __str__(self) -> str:
        return render(self.to_formula(), resugar=True)


@dataclass(frozen=True)
class ShapeFailure:
    """Why a formula is not in UDNF; ``subformula`` is the offending part."""

    reason: str
    subformula: Formula

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"{self.reason}: {render(self.subformula, resugar=True)}"


def _split(f: Formula, as_conj: bool) -> list[Formula]:
    # Propositional subtrees are kept whole; they become (part of) alpha.
    if is_propositional(f):
        return [f]
    if as_conj:
        pair = _as_conj(f)
        if pair is None:
            return [f]
    elif isinstance(f, Or):
        pair = (f.left, f.right)
    else:
        return [f]
    return _split(pair[0], as_conj) + _split(pair[1], as_conj)


def _prop_prenex(f: Formula) -> Prenex | ShapeFailure:
    for arg in (f.consequent, f.antecedent):
        if not is_propositional(arg):
            return ShapeFailure(
                f"nested prenex argument has modal depth {modal_depth(arg)}", arg)
    return (f.consequent, f.antecedent)


def udnf_shape(f: Formula) -> UdnfFormula | ShapeFailure:
    """Recognise ``f`` as a disjunction of canonical conjunctions.

    Top-level disjunctions and conjunctions may be associated arbitrarily;
    propositional conjuncts are folded into a single ``alpha`` (``true``
    when there is none).
    """
    disjuncts = []
    for d in _split(f, as_conj=False):
        props, pos, neg = [], [], []
        for c in _split(d, as_conj=True):
            if is_propositional(c):
                props.append(c)
            elif isinstance(c, Ob):
                pair = _prop_prenex(c)
                if isinstance(pair, ShapeFailure):
                    return pair
                pos.append(pair)
            elif isinstance(c, Neg) and isinstance(c.child, Ob):
                pair = _prop_prenex(c.child)
                if isinstance(pair, ShapeFailure):
                    return pair
                neg.append(pair)
            elif isinstance(c, Box) or (isinstance(c, Neg) and isinstance(c.child, Box)):
                return ShapeFailure("universal modality is not allowed in UDNF", c)
            else:
                return ShapeFailure("conjunct is neither propositional nor a (negated) prenex", c)
        alpha = _fold_conj(props) if props else TOP
        disjuncts.append(CanonicalConjunction(alpha, tuple(pos), tuple(neg)))
    return UdnfFormula(tuple(disjuncts))
