"""Finite left loops and their translation calculus.

A left loop here is a table with a two-sided identity at index 0 whose rows
are bijections (left translations are permutations).  Columns are *not*
required to be bijections; loops in the two-sided sense are the special case
where they are.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

from . import perm
from .fingroup import CapabilityError, InvalidTable
from .perm import Perm, PermGroup, closure, compose, inverse, stabilizer_of_zero


@dataclass(frozen=True)
class FiniteLeftLoop:
    """Left loop (B, .) on {0..n-1}; table[x][y] = x.y, identity at 0."""

    table: tuple
    labels: Optional[tuple] = None

    @property
    def n(self) -> int:
        return len(self.table)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    @cached_property
    def row_inverse(self) -> tuple:
        """row_inverse[x][y] is the unique z with x.z = y."""
        out = []
        for row in self.table:
            q = [0] * self.n
            for z, v in enumerate(row):
                q[v] = z
            out.append(tuple(q))
        return tuple(out)

    def left_div(self, x: int, y: int) -> int:
        return self.row_inverse[x][y]

    @cached_property
    def is_right_loop(self) -> bool:
        n = self.n
        cols = [[self.table[x][y] for x in range(n)] for y in range(n)]
        return all(sorted(c) == list(range(n)) for c in cols)

    @cached_property
    def is_group(self) -> bool:
        if not self.is_right_loop:
            return False
        from .fingroup import light_associativity_witness
        import numpy as np
        return light_associativity_witness(np.asarray(self.table, dtype=np.int16)) is None

    def __repr__(self):
        return f"FiniteLeftLoop(n={self.n})"


def validate_left_loop(rows, labels=None) -> FiniteLeftLoop:
    """Check the left-loop axioms; raise InvalidTable with a witness."""
    data = [list(r) for r in rows]
    n = len(data)
    if n == 0:
        raise InvalidTable("shape", (), "empty table")
    for x, row in enumerate(data):
        if len(row) != n:
            raise InvalidTable("shape", (x,), f"row {x} has length {len(row)}, expected {n}")
        for y, v in enumerate(row):
            if not 0 <= v < n:
                raise InvalidTable("range", (x, y), f"entry {v} out of range 0..{n - 1}")
    for y in range(n):
        if data[0][y] != y:
            raise InvalidTable("identity", (0, y), f"0.{y} = {data[0][y]}")
    for x in range(n):
        if data[x][0] != x:
            raise InvalidTable("identity", (x, 0), f"{x}.0 = {data[x][0]}")
    for x, row in enumerate(data):
        if sorted(row) != list(range(n)):
            raise InvalidTable("row-bijection", (x,), f"row {x} repeats a value")
    return FiniteLeftLoop(tuple(tuple(r) for r in data),
                          tuple(labels) if labels else None)


def left_translation(B: FiniteLeftLoop, x: int) -> Perm:
    """L_x: y -> x.y."""
    return tuple(B.table[x])


def left_divide(B: FiniteLeftLoop, x: int, y: int) -> int:
    """x \\ y, the unique z with x.z = y."""
    return B.left_div(x, y)


def right_inverse_map(B: FiniteLeftLoop):
    """(rho, lam): rho[x] = x \\ 0; lam is rho's inverse when rho is a bijection.

    lam, when present, is the unique-left-inverse map: lam[x].x = 0.  Its
    absence is a value, not an error.
    """
    rho = tuple(B.left_div(x, 0) for x in range(B.n))
    if sorted(rho) != list(range(B.n)):
        return rho, None
    return rho, inverse(rho)


def inner_mapping(B: FiniteLeftLoop, x: int, y: int) -> Perm:
    """L(x,y) = L_{x.y}^-1 L_x L_y; fixes 0."""
    xy = B.table[x][y]
    t = B.table
    div = B.row_inverse[xy]
    return tuple(div[t[x][t[y][z]]] for z in range(B.n))


def deviation(B: FiniteLeftLoop, x: int, phi: Perm) -> Perm:
    """mu_x(phi) = L_{phi(x)}^-1 phi L_x phi^-1."""
    t = B.table
    div = B.row_inverse[phi[x]]
    phinv = inverse(phi)
    return tuple(div[phi[t[x][phinv[z]]]] for z in range(B.n))


def lmlt(B: FiniteLeftLoop) -> PermGroup:
    """Left multiplication group: closure of all left translations."""
    return closure([left_translation(B, x) for x in range(B.n)], degree=B.n)


def lmlt1(B: FiniteLeftLoop) -> PermGroup:
    """Left inner mapping group: the stabilizer of 0 inside lmlt(B)."""
    return stabilizer_of_zero(lmlt(B))


def inner_mapping_closure(B: FiniteLeftLoop) -> PermGroup:
    """Closure of the left inner mappings; equals lmlt1(B) for every left loop."""
    gens = sorted({inner_mapping(B, x, y) for x in range(B.n) for y in range(B.n)})
    return closure(gens, degree=B.n)


def pseudo_automorphism_companions(B: FiniteLeftLoop, phi: Perm) -> tuple:
    """All companions c of phi: c.phi(x.y) = (c.phi(x)).phi(y) for all x, y.

    Nonempty iff phi is a pseudo-automorphism; 0 is a member iff phi is an
    automorphism.
    """
    t = B.table
    n = B.n
    out = []
    for c in range(n):
        ok = True
        for x in range(n):
            cx = t[c][phi[x]]
            rowx = t[x]
            for y in range(n):
                if t[c][phi[rowx[y]]] != t[cx][phi[y]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(c)
    return tuple(out)


def is_automorphism(B: FiniteLeftLoop, phi: Perm) -> bool:
    t = B.table
    return all(phi[t[x][y]] == t[phi[x]][phi[y]] for x in range(B.n) for y in range(B.n))


@dataclass(frozen=True)
class PsAutWitness:
    phi: Perm
    companions: tuple


def _sym1_candidates(n: int) -> Iterator[Perm]:
    for rest in itertools.permutations(range(1, n)):
        yield (0,) + rest


_EXHAUSTIVE_AUT_LIMIT = 8


def automorphism_group(B: FiniteLeftLoop) -> PermGroup:
    """Aut(B) by exhaustive filter of Sym_1(B); refuses for n > 8."""
    if B.n > _EXHAUSTIVE_AUT_LIMIT:
        raise CapabilityError(
            f"exhaustive automorphism search is limited to order {_EXHAUSTIVE_AUT_LIMIT}")
    els = [phi for phi in _sym1_candidates(B.n) if is_automorphism(B, phi)]
    return PermGroup(B.n, tuple(els), tuple(els))


def pseudo_automorphism_group(B: FiniteLeftLoop) -> tuple:
    """All pseudo-automorphisms with their companion sets; refuses for n > 8."""
    if B.n > _EXHAUSTIVE_AUT_LIMIT:
        raise CapabilityError(
            f"exhaustive pseudo-automorphism search is limited to order {_EXHAUSTIVE_AUT_LIMIT}")
    out = []
    for phi in _sym1_candidates(B.n):
        comps = pseudo_automorphism_companions(B, phi)
        if comps:
            out.append(PsAutWitness(phi, comps))
    return tuple(out)


def is_transassociant(B: FiniteLeftLoop, H: PermGroup):
    """Sabinin's condition: H <= Sym_1, contains every L(x,y), closed under deviations.

    Returns (True, None) or (False, witness) where the witness names what
    escaped: ("fixes", phi), ("inner", x, y) or ("deviation", x, phi).
    """
    for phi in H.elements:
        if phi[0] != 0:
            return False, ("fixes", phi)
    for x in range(B.n):
        for y in range(B.n):
            if inner_mapping(B, x, y) not in H:
                return False, ("inner", x, y)
    for phi in H.elements:
        for x in range(B.n):
            if deviation(B, x, phi) not in H:
                return False, ("deviation", x, phi)
    return True, None


def factored_product(B: FiniteLeftLoop, a, b):
    """Product of L_x phi and L_y psi in factored form.

    ((x, phi), (y, psi)) -> (x.phi(y), L(x, phi(y)) mu_y(phi) phi psi);
    composing the raw permutations gives the same element of Sym(B).
    """
    (x, phi), (y, psi) = a, b
    fy = phi[y]
    first = B.table[x][fy]
    second = compose(compose(inner_mapping(B, x, fy), deviation(B, y, phi)),
                     compose(phi, psi))
    return first, second


_ENUM_LIMIT = 6


def iter_left_loop_tables(n: int) -> Iterator[tuple]:
    """All left-loop tables of order n, deterministic backtracking order.

    Row 0 and column 0 are forced; each remaining row x is x followed by a
    permutation of the other values, enumerated lexicographically.
    """
    if n < 1:
        raise InvalidTable("shape", (n,), "order must be positive")
    if n > _ENUM_LIMIT:
        raise CapabilityError(f"exhaustive left-loop enumeration is limited to order {_ENUM_LIMIT}")
    if n == 1:
        yield ((0,),)
        return
    identity_row = tuple(range(n))
    row_choices = []
    for x in range(1, n):
        rest = [v for v in range(n) if v != x]
        row_choices.append([(x,) + p for p in itertools.permutations(rest)])
    for rows in itertools.product(*row_choices):
        yield (identity_row,) + rows


def enumerate_left_loops(n: int) -> Iterator[FiniteLeftLoop]:
    """All left loops of order n (n <= 6); lazily streamed, deterministic order."""
    for rows in iter_left_loop_tables(n):
        yield FiniteLeftLoop(rows)


def left_loop_count(n: int) -> int:
    """Number of left loops of order n: ((n-1)!)^(n-1) bordered row-latin tables."""
    f = 1
    for k in range(2, n):
        f *= k
    return f ** (n - 1)


def sample_left_loops(n: int, count: int, seed: int) -> Iterator[FiniteLeftLoop]:
    """Seeded random left loops of order n (supported up to order 8)."""
    if n > 8:
        raise CapabilityError("sampled left loops supported up to order 8")
    rng = random.Random(seed)
    identity_row = tuple(range(n))
    for _ in range(count):
        rows = [identity_row]
        for x in range(1, n):
            rest = [v for v in range(n) if v != x]
            rng.shuffle(rest)
            rows.append((x,) + tuple(rest))
        yield FiniteLeftLoop(tuple(rows))


def loop_from_group_table(table) -> FiniteLeftLoop:
    """View a group table as a left loop (groups are left loops)."""
    return validate_left_loop(table)


def lmlt_pair_decomposition(B: FiniteLeftLoop):
    """Unique factorization data for G = LMlt(B): phi = L_{phi(0)} psi.

    Returns (G, pairs) where pairs[i] = (x, psi) for G.elements[i], with
    psi = L_x^-1 phi fixing 0.  The pair is unique by (L(B) cap Sym_1 = {I}).
    """
    G = lmlt(B)
    pairs = []
    for phi in G.elements:
        x = phi[0]
        psi = compose(inverse(left_translation(B, x)), phi)
        pairs.append((x, psi))
    return G, tuple(pairs)
