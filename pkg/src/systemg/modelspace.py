"""Vectorised evaluation of a formula over every model of a fixed size.

Each row of a :class:`ModelSpace` is one model; its truth set is stored as
a bitmask over the worlds (bit ``i`` is world ``w{i+1}``).  Rows are ordered
exactly as :func:`systemg.testkit.enumerate_models` yields models: by
preorder first, then by valuation index.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .semantics import Model
from .syntax import Atom, Box, Formula, Neg, Ob, Or, Top

__all__ = ["MAX_WORLDS", "preorders", "world_names", "valuation_of", "ModelSpace", "model_spaces"]

MAX_WORLDS = 5


def world_names(n: int) -> tuple[str, ...]:
    return tuple(f"w{i + 1}" for i in range(n))


@lru_cache(maxsize=None)
def preorders(n: int) -> tuple[tuple[int, ...], ...]:
    """All total preorders on ``n`` labelled worlds, as rank tuples.

    A rank tuple is kept iff its set of ranks is an initial segment
    ``{0, .., k-1}``; those are in bijection with the total preorders.
    """
    out = []
    for ranks in product(range(n), repeat=n):
        if set(ranks) == set(range(max(ranks) + 1)):
            out.append(ranks)
    return tuple(out)


def valuation_of(index: int, n: int, atoms: Sequence[str]) -> dict[str, int]:
    """Decode a valuation index into a world bitmask per atom."""
    full = (1 << n) - 1
    return {a: (index >> (j * n)) & full for j, a in enumerate(atoms)}


def _opt_mask(ranks: tuple[int, ...], mask: int) -> int:
    members = [i for i in range(len(ranks)) if mask >> i & 1]
    if not members:
        return 0
    top = max(ranks[i] for i in members)
    return sum(1 << i for i in members if ranks[i] == top)


class ModelSpace:
    """Every model with ``n`` worlds over ``atoms`` (optionally a row slice)."""

    def __init__(self, n: int, atoms: Sequence[str], start: int = 0, stop: int | None = None):
        if not 1 <= n <= MAX_WORLDS:
            raise ValueError(f"number of worlds must be in 1..{MAX_WORLDS}, got {n}")
        self.n = n
        self.atoms = tuple(sorted(atoms))
        self.full = (1 << n) - 1
        self.orders = preorders(n)
        self.n_valuations = 1 << (n * len(self.atoms))
        self.total = len(self.orders) * self.n_valuations
        self.start = start
        self.stop = self.total if stop is None else min(stop, self.total)

        rows = np.arange(self.start, self.stop, dtype=np.int64)
        order_index = rows // self.n_valuations
        val = rows % self.n_valuations
        self._atom_masks = {
            a: ((val >> (j * n)) & self.full).astype(np.uint8)
            for j, a in enumerate(self.atoms)}
        table = np.array([[_opt_mask(r, x) for x in range(1 << n)] for r in self.orders],
                         dtype=np.uint8)
        self._opt_flat = table.ravel()
        self._opt_base = order_index * (1 << n)

    def __len__(self) -> int:
        return self.stop - self.start

    def model(self, row: int) -> Model:
        """The model at absolute row index ``row``."""
        ranks = self.orders[row // self.n_valuations]
        masks = valuation_of(row % self.n_valuations, self.n, self.atoms)
        names = world_names(self.n)
        return Model(names, dict(zip(names, ranks)),
                     {a: frozenset(names[i] for i in range(self.n) if m >> i & 1)
                      for a, m in masks.items()})

    def evaluate(self, f: Formula, memo: dict | None = None) -> np.ndarray:
        """Truth-set bitmask of ``f`` for every row."""
        return self._eval(f, {} if memo is None else memo)

    def _eval(self, f: Formula, memo: dict) -> np.ndarray:
        try:
            return memo[f]
        except KeyError:
            pass
        full = np.uint8(self.full)
        if isinstance(f, Top):
            out = np.full(len(self), full, dtype=np.uint8)
        elif isinstance(f, Atom):
            try:
                out = self._atom_masks[f.name]
            except KeyError:
                raise ValueError(f"atom {f.name!r} not in model space {self.atoms}") from None
        elif isinstance(f, Neg):
            out = self._eval(f.child, memo) ^ full
        elif isinstance(f, Or):
            out = self._eval(f.left, memo) | self._eval(f.right, memo)
        elif isinstance(f, Ob):
            ante = self._eval(f.antecedent, memo)
            best = self._opt_flat[self._opt_base + ante]
            bad = best & (self._eval(f.consequent, memo) ^ full)
            out = np.where(bad == 0, full, np.uint8(0))
        elif isinstance(f, Box):
            out = np.where(self._eval(f.child, memo) == full, full, np.uint8(0))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out


# Spaces up to this many rows are built in one piece and cached.
CHUNK_ROWS = 1 << 19


@lru_cache(maxsize=16)
def _cached_space(n: int, atoms: tuple[str, ...]) -> ModelSpace:
    return ModelSpace(n, atoms)


def model_spaces(n: int, atoms: Sequence[str], max_rows: int = CHUNK_ROWS) -> Iterator[ModelSpace]:
    """Cover all models with ``n`` worlds over ``atoms`` by slices of at most ``max_rows``."""
    atoms = tuple(sorted(atoms))
    total = len(preorders(n)) << (n * len(atoms))
    if total <= max_rows:
        yield _cached_space(n, atoms)
        return
    for lo in range(0, total, max_rows):
        yield ModelSpace(n, atoms, lo, lo + max_rows)
