"""Finite groups as Cayley tables on {0..n-1} with the identity at index 0.

Everything downstream (loops, transversal decompositions, products) consumes
groups in this form, so the conventions are enforced here once: tables are
square, entries are indices, and index 0 is always the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np

IndexSet = tuple  # sorted, duplicate-free tuple of element indices


class InvalidTable(ValueError):
    """A table failed a structural axiom; carries the axiom name and a witness."""

    def __init__(self, axiom: str, witness: tuple, message: str):
        super().__init__(f"{axiom}: {message} (witness {witness})")
        self.axiom = axiom
        self.witness = witness


class CapabilityError(ValueError):
    """The requested exhaustive computation exceeds the supported size."""


@dataclass(frozen=True)
class FiniteGroup:
    """Group of order n given by its full multiplication table.

    table[x][y] is the product xy.  Identity is index 0.  `labels` optionally
    names the elements, `name` optionally names the group (used in reports).
    """

    table: tuple
    labels: Optional[tuple] = None
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    @cached_property
    def inverses(self) -> tuple:
        return tuple(row.index(0) for row in self.table)

    @cached_property
    def np_table(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int16)

    @cached_property
    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.n) for b in range(self.n))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        return k

    def conjugate(self, g: int, x: int) -> int:
        """g x g^-1"""
        t = self.table
        return t[t[g][x]][self.inv(g)]

    def label_of(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def __repr__(self):
        return f"FiniteGroup(n={self.n}, name={self.name!r})"


def _as_rows(rows) -> list:
    if isinstance(rows, FiniteGroup):
        return [list(r) for r in rows.table]
    if isinstance(rows, np.ndarray):
        return rows.tolist()
    return [list(r) for r in rows]


def _table_generators(T: np.ndarray) -> list:
    """Greedy generating set of a table with identity row/column at 0.

    Elements are reached by left-associated products of the generators, which
    is exactly what the Light associativity test needs.
    """
    n = len(T)
    reached = np.zeros(n, dtype=bool)
    reached[0] = True
    gens: list = []
    while not reached.all():
        x = int(np.argmin(reached))
        gens.append(x)
        frontier = np.flatnonzero(reached)
        while frontier.size:
            nxt = T[np.ix_(frontier, np.asarray(gens))].ravel()
            nxt = nxt[~reached[nxt]]
            if nxt.size == 0:
                break
            reached[nxt] = True
            frontier = np.unique(nxt)
    return gens


def light_associativity_witness(T: np.ndarray) -> Optional[tuple]:
    """Return a non-associative triple (a, g, b) or None.

    Light's test: with G a generating set of the table, a(gb) = (ag)b for all
    a, b and g in G forces full associativity, because the set of elements z
    with a(zb) = (az)b for all a, b is closed under the table product.
    Requires the identity row/column to be valid (checked by the caller).
    """
    for g in _table_generators(T):
        left = T[:, T[g]]          # [a, b] -> a (g b)
        right = T[T[:, g], :]      # [a, b] -> (a g) b
        if not np.array_equal(left, right):
            a, b = np.argwhere(left != right)[0]
            return (int(a), int(g), int(b))
    return None


def validate_group(rows, labels=None, name=None) -> FiniteGroup:
    """Check all group axioms on a table; raise InvalidTable with a witness.

    Checks, in order: shape, entry range, identity at 0, row/column
    bijectivity, associativity (Light's test), two-sided inverses.
    """
    data = _as_rows(rows)
    n = len(data)
    if n == 0:
        raise InvalidTable("shape", (), "empty table")
    for x, row in enumerate(data):
        if len(row) != n:
            raise InvalidTable("shape", (x,), f"row {x} has length {len(row)}, expected {n}")
    T = np.asarray(data, dtype=np.int64)
    if T.min() < 0 or T.max() >= n:
        x, y = map(int, np.argwhere((T < 0) | (T >= n))[0])
        raise InvalidTable("range", (x, y), f"entry {data[x][y]} out of range 0..{n - 1}")
    T = T.astype(np.int16)
    ar = np.arange(n, dtype=np.int16)
    if not np.array_equal(T[0], ar):
        y = int(np.argmin(T[0] == ar))
        raise InvalidTable("identity", (0, y), f"0*{y} = {data[0][y]}, identity must sit at index 0")
    if not np.array_equal(T[:, 0], ar):
        x = int(np.argmin(T[:, 0] == ar))
        raise InvalidTable("identity", (x, 0), f"{x}*0 = {data[x][0]}")
    rs = np.sort(T, axis=1)
    if not np.array_equal(rs, np.broadcast_to(ar, (n, n))):
        x = int(np.argmin((rs == ar).all(axis=1)))
        raise InvalidTable("row-bijection", (x,), f"row {x} is not a bijection (no inverse)")
    cs = np.sort(T, axis=0)
    if not np.array_equal(cs, np.broadcast_to(ar[:, None], (n, n))):
        y = int(np.argmin((cs == ar[:, None]).all(axis=0)))
        raise InvalidTable("col-bijection", (y,), f"column {y} is not a bijection")
    w = light_associativity_witness(T)
    if w is not None:
        a, g, b = w
        raise InvalidTable(
            "associativity", w,
            f"({a}*{g})*{b} = {data[data[a][g]][b]} but {a}*({g}*{b}) = {data[a][data[g][b]]}")
    for x in range(n):
        y = data[x].index(0)
        if data[y][x] != 0:
            raise InvalidTable("inverse", (x, y), f"{x}*{y} = 0 but {y}*{x} = {data[y][x]}")
    table = tuple(tuple(int(v) for v in row) for row in data)
    return FiniteGroup(table, tuple(labels) if labels else None, name)


def is_subgroup(G: FiniteGroup, S: Sequence[int]) -> bool:
    sset = set(S)
    if 0 not in sset or any(not 0 <= s < G.n for s in sset):
        return False
    t = G.table
    return all(t[a][b] in sset for a in sset for b in sset) and all(G.inv(a) in sset for a in sset)


def generated_subgroup(G: FiniteGroup, S: Sequence[int]) -> IndexSet:
    """Closure of S (plus the identity) under products; <S>."""
    t = G.table
    seen = {0}
    gens = [s for s in dict.fromkeys(S) if s != 0]
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = t[a][g]
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return tuple(sorted(seen))


def core(G: FiniteGroup, H: Sequence[int]) -> IndexSet:
    """Intersection of all conjugates gHg^-1: the largest normal subgroup inside H."""
    if not is_subgroup(G, H):
        raise InvalidTable("subgroup", tuple(H), "core requires a subgroup")
    t = G.table
    result = set(H)
    for g in range(G.n):
        gi = G.inv(g)
        result &= {t[t[g][h]][gi] for h in H}
        if result == {0}:
            break
    return tuple(sorted(result))


def left_cosets(G: FiniteGroup, H: Sequence[int]) -> list:
    """Partition into left cosets gH, ordered by least element."""
    t = G.table
    seen = set()
    blocks = []
    for g in range(G.n):
        if g in seen:
            continue
        block = tuple(sorted(t[g][h] for h in H))
        seen.update(block)
        blocks.append(block)
    return blocks


def is_unital_transversal(G: FiniteGroup, H: Sequence[int], B: Sequence[int]) -> bool:
    """One representative per left coset of H, with 0 among them."""
    bset = set(B)
    if 0 not in bset or len(bset) != len(B):
        return False
    blocks = left_cosets(G, H)
    return len(B) == len(blocks) and all(len(bset & set(blk)) == 1 for blk in blocks)


def is_left_transversal(G: FiniteGroup, H: Sequence[int], B: Sequence[int]) -> bool:
    bset = set(B)
    if len(bset) != len(B):
        return False
    blocks = left_cosets(G, H)
    return len(B) == len(blocks) and all(len(bset & set(blk)) == 1 for blk in blocks)


def normalize_transversal(G: FiniteGroup, H: Sequence[int], B: Sequence[int]) -> IndexSet:
    """Turn a left transversal into a unital one by right-translating: B e^-1."""
    if not is_left_transversal(G, H, B):
        raise InvalidTable("transversal", tuple(B), "not a left transversal of the subgroup")
    hset = set(H)
    e = next(b for b in B if b in hset)
    ei = G.inv(e)
    t = G.table
    return tuple(sorted(t[b][ei] for b in B))


def enumerate_unital_transversals(G: FiniteGroup, H: Sequence[int], limit: int = 0) -> list:
    """All unital transversals in lexicographic order; limit 0 means all.

    The identity coset is always represented by 0, each other coset by any of
    its |H| members, so the count is |H|^(#cosets - 1).
    """
    blocks = [blk for blk in left_cosets(G, H) if 0 not in blk]
    out = sorted(tuple(sorted((0,) + pick)) for pick in itertools.product(*blocks))
    if limit:
        out = out[:limit]
    return out


def quotient(G: FiniteGroup, K: Sequence[int]):
    """Factor group G/K for K normal; returns (group, projection g -> [gK]).

    The identity coset gets index 0; the remaining cosets are indexed by
    least element, ascending.
    """
    if not is_subgroup(G, K):
        raise InvalidTable("subgroup", tuple(K), "quotient requires a subgroup")
    t = G.table
    for g in range(G.n):
        gi = G.inv(g)
        for k in K:
            if t[t[g][k]][gi] not in set(K):
                raise InvalidTable("normality", (g, k), f"{g}*{k}*{g}^-1 escapes the subgroup")
    blocks = left_cosets(G, K)
    blocks.sort(key=lambda blk: (0 not in blk, blk[0]))
    index_of = {}
    for i, blk in enumerate(blocks):
        for g in blk:
            index_of[g] = i
    proj = tuple(index_of[g] for g in range(G.n))
    m = len(blocks)
    table = [[0] * m for _ in range(m)]
    for i, blk_i in enumerate(blocks):
        for j, blk_j in enumerate(blocks):
            table[i][j] = index_of[t[blk_i[0]][blk_j[0]]]
    return validate_group(table, name=f"{G.name}/K" if G.name else None), proj


def subgroup_as_group(G: FiniteGroup, S: Sequence[int], name=None) -> FiniteGroup:
    """Reindex a subgroup (sorted order, identity first) as a standalone group."""
    S = tuple(sorted(set(S)))
    if not is_subgroup(G, S):
        raise InvalidTable("subgroup", S, "not a subgroup")
    pos = {s: i for i, s in enumerate(S)}
    t = G.table
    table = [[pos[t[a][b]] for b in S] for a in S]
    return FiniteGroup(tuple(tuple(r) for r in table), name=name)


def all_subgroups(G: FiniteGroup) -> list:
    """Every subgroup, as sorted index tuples, ordered by (size, elements)."""
    subs = {(0,)}
    frontier = [(0,)]
    while frontier:
        nxt = []
        for S in frontier:
            sset = set(S)
            for g in range(1, G.n):
                if g in sset:
                    continue
                T = generated_subgroup(G, S + (g,))
                if T not in subs:
                    subs.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted(subs, key=lambda s: (len(s), s))


# --- isomorphism testing -------------------------------------------------

def _profiles(G: FiniteGroup) -> list:
    """(element order, centralizer size) per element; an isomorphism invariant."""
    t = G.table
    out = []
    for a in range(G.n):
        cent = sum(1 for b in range(G.n) if t[a][b] == t[b][a])
        out.append((G.element_order(a), cent))
    return out


def _generating_words(G: FiniteGroup, gens: Sequence[int]):
    """BFS order of <gens> with, per element, (parent, generator position)."""
    t = G.table
    order = [0]
    word = {0: None}
    qi = 0
    while qi < len(order):
        a = order[qi]
        qi += 1
        for i, g in enumerate(gens):
            b = t[a][g]
            if b not in word:
                word[b] = (a, i)
                order.append(b)
    return order, word


def are_isomorphic(G1: FiniteGroup, G2: FiniteGroup) -> Optional[tuple]:
    """An isomorphism G1 -> G2 as an image tuple, or None.

    Backtracking over generator images, pruned by (order, centralizer-size)
    profiles and by matching the sizes of the generated subgroups level by
    level; fine for the desk-scale orders this library targets.
    """
    n = G1.n
    if n != G2.n:
        return None
    if n == 1:
        return (0,)
    prof1, prof2 = _profiles(G1), _profiles(G2)
    if sorted(prof1) != sorted(prof2):
        return None
    # greedy generating sequence of G1
    gens: list = []
    span: IndexSet = (0,)
    while len(span) < n:
        g = next(x for x in range(n) if x not in set(span))
        gens.append(g)
        span = generated_subgroup(G1, tuple(gens))
    candidates = [[b for b in range(n) if prof2[b] == prof1[g]] for g in gens]

    spans = []
    for i in range(len(gens)):
        sub = generated_subgroup(G1, tuple(gens[: i + 1]))
        order, word = _generating_words(G1, gens[: i + 1])
        spans.append((order, word, sub))

    def rec(level: int, images: list):
        sub_order, sub_word, sub = spans[level]
        img_span = generated_subgroup(G2, tuple(images))
        if len(img_span) != len(sub):
            return None
        phi = _extend_map_sub(G1, G2, sub, sub_order, sub_word, images)
        if phi is None:
            return None
        if level + 1 == len(gens):
            return phi
        for cand in candidates[level + 1]:
            out = rec(level + 1, images + [cand])
            if out is not None:
                return out
        return None

    for cand in candidates[0]:
        phi = rec(0, [cand])
        if phi is not None:
            return tuple(phi[a] for a in range(n))
    return None


def _extend_map_sub(G1, G2, sub, order, word, images):
    phi = {0: 0}
    t1, t2 = G1.table, G2.table
    for a in order[1:]:
        parent, i = word[a]
        phi[a] = t2[phi[parent]][images[i]]
    if len(set(phi.values())) != len(phi):
        return None
    for a in sub:
        ra1, ra2 = t1[a], t2[phi[a]]
        for b in sub:
            if phi[ra1[b]] != ra2[phi[b]]:
                return None
    return phi


# --- constructions and the small-order catalog ----------------------------

def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), name="Z1")


def cyclic_group(n: int) -> FiniteGroup:
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(table, name=f"Z{n}")


def direct_product(A: FiniteGroup, B: FiniteGroup, name=None) -> FiniteGroup:
    """Index convention (a, b) -> a*|B| + b."""
    nb = B.n
    ta, tb = A.table, B.table
    table = tuple(
        tuple(ta[a1][a2] * nb + tb[b1][b2] for a2 in range(A.n) for b2 in range(nb))
        for a1 in range(A.n) for b1 in range(nb)
    )
    return FiniteGroup(table, name=name or f"{A.name}x{B.name}")


def group_from_action(B: FiniteGroup, T: FiniteGroup, phis: Sequence[Sequence[int]],
                      name=None) -> FiniteGroup:
    """Classical semidirect product B x| T from an action of T by automorphisms.

    phis[t] is the index permutation of B applied by t; (b, t)(c, s) =
    (b * phis[t](c), t s).  The result is validated, which catches non-action
    inputs.
    """
    nt = T.n
    tb, tt = B.table, T.table
    table = tuple(
        tuple(tb[b][phis[t][c]] * nt + tt[t][s] for c in range(B.n) for s in range(nt))
        for b in range(B.n) for t in range(nt)
    )
    return validate_group(table, name=name)


def semidirect_cyclic(n: int, m: int, k: int, name=None) -> FiniteGroup:
    """Z_n x| Z_m where the generator of Z_m acts by x -> k x (k^m = 1 mod n)."""
    if pow(k, m, n) != 1 % n:
        raise ValueError(f"k={k} does not define an order-dividing-{m} action mod {n}")
    phis = [[(x * pow(k, t, n)) % n for x in range(n)] for t in range(m)]
    return group_from_action(cyclic_group(n), cyclic_group(m), phis,
                             name=name or f"Z{n}:Z{m}(k={k})")


def dihedral_group(q: int) -> FiniteGroup:
    """Dihedral group of order 2q (q >= 3)."""
    return semidirect_cyclic(q, 2, q - 1, name=f"D{q}")


def dicyclic_group(q: int) -> FiniteGroup:
    """Dicyclic group of order 4q: a^2q = 1, b^2 = a^q, b a b^-1 = a^-1.

    q = 2 is the quaternion group Q8; q = 2^(k-2) gives generalized quaternion.
    """
    n2 = 2 * q

    def mul(i, j, k, l):
        if j == 0:
            return ((i + k) % n2, l)
        if l == 0:
            return ((i - k) % n2, 1)
        return ((i - k + q) % n2, 0)

    table = tuple(
        tuple(mul(i, j, k, l)[0] * 2 + mul(i, j, k, l)[1]
              for k in range(n2) for l in range(2))
        for i in range(n2) for j in range(2)
    )
    name = "Q8" if q == 2 else (f"Q{4*q}" if (q & (q - 1)) == 0 else f"Dic{q}")
    return FiniteGroup(table, name=name)


def alternating4() -> FiniteGroup:
    """A4 as (Z2 x Z2) x| Z3, the Z3 cycling the three involutions."""
    v4 = direct_product(cyclic_group(2), cyclic_group(2), name="V4")
    sigma = [0, 2, 3, 1]
    phis = [[x for x in range(4)], sigma, [sigma[sigma[x]] for x in range(4)]]
    return group_from_action(v4, cyclic_group(3), phis, name="A4")


def _partitions(e: int) -> Iterator[tuple]:
    if e == 0:
        yield ()
        return
    for first in range(e, 0, -1):
        for rest in _partitions(e - first):
            if not rest or rest[0] <= first:
                yield (first,) + rest


def _prime_factors(n: int) -> list:
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and _prime_factors(n) == [n]


def abelian_groups(n: int) -> list:
    """One group per abelian isomorphism class of order n, cyclic first."""
    primes = sorted(set(_prime_factors(n)))
    exps = {p: _prime_factors(n).count(p) for p in primes}
    per_prime = [[tuple(p ** part for part in parts) for parts in _partitions(exps[p])]
                 for p in primes]
    out = []
    for combo in itertools.product(*per_prime):
        factors = [f for group in combo for f in group]
        if len(factors) <= 1:
            out.append(cyclic_group(n))
            continue
        g = cyclic_group(factors[0])
        for f in factors[1:]:
            g = direct_product(g, cyclic_group(f))
        g = FiniteGroup(g.table, name="x".join(f"Z{f}" for f in factors))
        out.append(g)
    out.sort(key=lambda g: g.name != f"Z{n}")
    return out


def small_group_catalog(max_order: int) -> list:
    """Deterministic catalog with one representative per isomorphism class.

    Complete for orders <= 15 via cyclic/abelian/dihedral/dicyclic/A4 plus a
    handful of order-16 constructions (13 of the 14 classes at order 16; the
    central product D4 o Z4 is not built).
    """
    if max_order > 16:
        raise CapabilityError("catalog is curated for orders <= 16")
    out = []
    for n in range(1, max_order + 1):
        cands = abelian_groups(n) if n > 1 else [trivial_group()]
        if n % 2 == 0 and n >= 6:
            cands.append(dihedral_group(n // 2))
        if n % 4 == 0 and n >= 8:
            cands.append(dicyclic_group(n // 4))
        if n == 12:
            cands.append(alternating4())
        if n == 16:
            cands.append(semidirect_cyclic(8, 2, 3, name="SD16"))
            cands.append(semidirect_cyclic(8, 2, 5, name="M4(2)"))
            cands.append(semidirect_cyclic(4, 4, 3, name="Z4:Z4"))
            cands.append(direct_product(dihedral_group(4), cyclic_group(2), name="D4xZ2"))
            cands.append(direct_product(dicyclic_group(2), cyclic_group(2), name="Q8xZ2"))
            v4 = direct_product(cyclic_group(2), cyclic_group(2), name="V4")
            swap = [0, 2, 1, 3]
            cands.append(group_from_action(
                v4, cyclic_group(4), [list(range(4)), swap, list(range(4)), swap],
                name="(Z2xZ2):Z4"))
        kept: list = []
        for g in cands:
            if all(are_isomorphic(g, k) is None for k in kept):
                kept.append(g)
        out.extend(kept)
    return out
