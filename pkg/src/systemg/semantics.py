"""Finite preference models and the truth definition.

A model is a finite set of worlds with a total preorder, encoded as an
integer rank per world (higher rank = at least as good), and a valuation.
``t <= s`` in the preference order iff ``rank[t] <= rank[s]``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping

from .syntax import Atom, Box, Formula, Neg, Ob, Or, Top

__all__ = [
    "Model", "ValidationReport", "InvalidModelError", "Globality",
    "validate_model", "opt_set", "truth_set", "holds_at", "is_globally_true",
    "LIMITEDNESS_CHECK_MAX",
]

# Limitedness is checked over all non-empty subsets up to this many worlds.
LIMITEDNESS_CHECK_MAX = 5


class InvalidModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Model:
    worlds: tuple[str, ...]
    rank: Mapping[str, int]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "rank", dict(self.rank))
        object.__setattr__(
            self, "valuation", {k: frozenset(v) for k, v in self.valuation.items()})

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.worlds == other.worlds and self.rank == other.rank
                and self.valuation == other.valuation)

    __hash__ = None

    @cached_property
    def world_set(self) -> frozenset[str]:
        return frozenset(self.worlds)

    @cached_property
    def report(self) -> "ValidationReport":
        return validate_model(self)

    def prefers(self, t: str, s: str) -> bool:
        """``t <= s``: world ``s`` is at least as good as ``t``."""
        return self.rank[t] <= self.rank[s]

    def to_dict(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "rank": {w: self.rank[w] for w in self.worlds if w in self.rank},
            "valuation": {p: sorted(ws, key=self._world_order)
                          for p, ws in sorted(self.valuation.items())},
        }

    def _world_order(self, w: str):
        try:
            return (0, self.worlds.index(w))
        except ValueError:
            return (1, w)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Model":
        return cls(tuple(data["worlds"]), dict(data.get("rank", {})),
                   {k: frozenset(v) for k, v in data.get("valuation", {}).items()})

    @classmethod
    def from_json(cls, text: str) -> "Model":
        return cls.from_dict(json.loads(text))


@dataclass
class ValidationReport:
    checks: dict[str, bool]
    errors: list[str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.ok


def _max_elements(rank: Mapping[str, int], xs: Iterable[str]) -> frozenset[str]:
    xs = list(xs)
    return frozenset(x for x in xs if all(rank[y] <= rank[x] for y in xs))


def validate_model(m: Model) -> ValidationReport:
    """Check the structural and order-theoretic conditions on ``m``.

    Problems are reported, never raised.
    """
    checks: dict[str, bool] = {}
    errors: list[str] = []
    worlds = m.world_set

    checks["non_empty"] = bool(m.worlds)
    if not m.worlds:
        errors.append("model has no worlds")
    checks["distinct_worlds"] = len(worlds) == len(m.worlds)
    if not checks["distinct_worlds"]:
        errors.append("duplicate world identifiers")

    missing = [w for w in m.worlds if w not in m.rank]
    extra = sorted(set(m.rank) - worlds)
    bad = [w for w, r in m.rank.items()
           if not isinstance(r, int) or isinstance(r, bool) or r < 0]
    checks["rank_total"] = not missing and not extra
    if missing:
        errors.append(f"rank not total: missing {', '.join(missing)}")
    if extra:
        errors.append(f"rank mentions unknown worlds: {', '.join(extra)}")
    checks["rank_values"] = not bad
    if bad:
        errors.append(f"ranks must be non-negative integers: {', '.join(map(str, bad))}")

    unknown = sorted({w for ws in m.valuation.values() for w in ws} - worlds)
    checks["valuation_within_worlds"] = not unknown
    if unknown:
        errors.append(f"valuation mentions unknown world(s): {', '.join(unknown)}")

    if checks["rank_total"] and checks["rank_values"]:
        ws = list(worlds)
        leq = m.prefers
        checks["reflexive"] = all(leq(s, s) for s in ws)
        checks["transitive"] = all(
            leq(s, u) for s in ws for t in ws for u in ws if leq(s, t) and leq(t, u))
        checks["fully_connected"] = all(leq(s, t) or leq(t, s) for s in ws for t in ws)
        if len(ws) <= LIMITEDNESS_CHECK_MAX:
            checks["limited"] = all(
                _max_elements(m.rank, xs)
                for k in range(1, len(ws) + 1) for xs in combinations(ws, k))
        for name in ("reflexive", "transitive", "fully_connected", "limited"):
            if not checks.get(name, True):
                errors.append(f"preference relation is not {name.replace('_', ' ')}")
    return ValidationReport(checks, errors)


def _require_valid(m: Model) -> None:
    if not m.report.ok:
        raise InvalidModelError("; ".join(m.report.errors))


def opt_set(m: Model, x: Iterable[str]) -> frozenset[str]:
    """The best worlds of ``x``: those at least as good as every world in ``x``."""
    x = frozenset(x)
    unknown = x - m.world_set
    if unknown:
        raise ValueError(f"unknown world(s): {', '.join(sorted(unknown))}")
    return _max_elements(m.rank, x)


def truth_set(m: Model, f: Formula) -> frozenset[str]:
    """The set of worlds of ``m`` at which ``f`` is true."""
    _require_valid(m)
    return _truth(m, f, {})


def _truth(m: Model, f: Formula, memo: dict) -> frozenset[str]:
    try:
        return memo[f]
    except KeyError:
        pass
    everything = m.world_set
    if isinstance(f, Top):
        out = everything
    elif isinstance(f, Atom):
        out = m.valuation.get(f.name, frozenset())
    elif isinstance(f, Neg):
        out = everything - _truth(m, f.child, memo)
    elif isinstance(f, Or):
        out = _truth(m, f.left, memo) | _truth(m, f.right, memo)
    elif isinstance(f, Ob):
        best = _max_elements(m.rank, _truth(m, f.antecedent, memo))
        out = everything if best <= _truth(m, f.consequent, memo) else frozenset()
    elif isinstance(f, Box):
        out = everything if _truth(m, f.child, memo) == everything else frozenset()
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def holds_at(m: Model, w: str, f: Formula) -> bool:
    if w not in m.world_set:
        raise ValueError(f"unknown world {w!r}")
    return w in truth_set(m, f)


class Globality(str, enum.Enum):
    EVERYWHERE = "everywhere"
    NOWHERE = "nowhere"
    MIXED = "mixed"

    def __str__(self) -> str:
        return self.value


def is_globally_true(m: Model, f: Formula) -> Globality:
    ts = truth_set(m, f)
    if ts == m.world_set:
        return Globality.EVERYWHERE
    if not ts:
        return Globality.NOWHERE
    return Globality.MIXED
