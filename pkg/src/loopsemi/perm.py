"""Permutations of {0..n-1} as image tuples, and groups of them.

Composition convention, fixed once for the whole library: compose(f, g) is
"g first, then f", i.e. compose(f, g)(i) = f(g(i)).  Written
multiplicatively, f g means apply g, then f.  All translation-calculus
formulas elsewhere (inner mappings, deviations, products) read exactly as in
operator notation because of this choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .fingroup import FiniteGroup, InvalidTable

Perm = tuple  # images: p[i] is the image of i


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_perm(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(f: Perm, g: Perm) -> Perm:
    """f after g: compose(f, g)(i) = f(g(i))."""
    if len(f) != len(g):
        raise InvalidTable("degree", (len(f), len(g)), "composing permutations of different degree")
    return tuple(f[g[i]] for i in range(len(g)))


def inverse(f: Perm) -> Perm:
    q = [0] * len(f)
    for i, v in enumerate(f):
        q[v] = i
    return tuple(q)


@dataclass(frozen=True)
class PermGroup:
    """Permutation group; `elements` keeps identity first, then BFS discovery order."""

    degree: int
    elements: tuple
    generators: tuple

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    @cached_property
    def position(self) -> dict:
        return {p: i for i, p in enumerate(self.elements)}

    def __contains__(self, p: Perm) -> bool:
        return p in self.element_set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={len(self.elements)})"


def closure(gens: Sequence[Perm], degree: Optional[int] = None) -> PermGroup:
    """Group generated by gens: breadth-first products until nothing new appears.

    Deterministic: identity first, then BFS discovery order (frontier element
    composed with each generator in the given order).  Finite degree makes
    inverse closure automatic.
    """
    gens = [tuple(g) for g in gens]
    if not gens and degree is None:
        raise InvalidTable("degree", (), "closure needs generators or an explicit degree")
    n = degree if degree is not None else len(gens[0])
    for g in gens:
        if len(g) != n:
            raise InvalidTable("degree", (len(g), n), "generator degree mismatch")
        if not is_perm(g):
            raise InvalidTable("bijection", g, "generator is not a permutation")
    e = identity(n)
    elements = [e]
    seen = {e}
    qi = 0
    while qi < len(elements):
        x = elements[qi]
        qi += 1
        for g in gens:
            y = compose(x, g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
    return PermGroup(n, tuple(elements), tuple(gens))


def stabilizer_of_zero(G: PermGroup) -> PermGroup:
    """Subgroup of elements fixing 0 (Sym_1-part); keeps the ambient ordering."""
    els = tuple(p for p in G.elements if p[0] == 0)
    return PermGroup(G.degree, els, els)


def to_cayley(G: PermGroup):
    """Cayley table of a PermGroup plus the index -> permutation labeling.

    Index i is G.elements[i]; identity is index 0 by construction, so the
    result satisfies the FiniteGroup conventions directly.
    """
    pos = G.position
    table = tuple(
        tuple(pos[compose(a, b)] for b in G.elements) for a in G.elements
    )
    group = FiniteGroup(table, labels=tuple(str(list(p)) for p in G.elements))
    return group, G.elements
