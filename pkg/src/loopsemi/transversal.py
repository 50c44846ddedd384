"""Internal semidirect products: transversal decompositions G = BH.

Given a group G, a subgroup H and a unital transversal B of H, every element
factors uniquely as g = x h with x in B, h in H.  The induced loop, the
transversal mapping l, the coset action sigma, the interaction map m, the
core N and the involution candidate tau are all derived here, and the
structure theorems relating them are exposed as executable verifiers that
return violation lists (expected empty).

Derived tables use two index spaces: "G elements" are indices into G's
carrier; "loop indices" are 0..|B|-1 with loop index i standing for the G
element B[i] (B is kept sorted, so 0 is loop index 0).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import identities
from .fingroup import (FiniteGroup, InvalidTable, core, generated_subgroup,
                       is_prime, is_subgroup, is_unital_transversal,
                       left_cosets, normalize_transversal, quotient,
                       subgroup_as_group, validate_group)
from .finloop import (FiniteLeftLoop, deviation, inner_mapping, lmlt, lmlt1,
                      left_translation, validate_left_loop)
from .perm import Perm, PermGroup, compose, identity, to_cayley
from .semidirect import ExternalSpec, standard_product


class DecompositionError(RuntimeError):
    """A structural fact guaranteed by the construction failed; indicates a bug."""


def _require(cond: bool, what: str):
    if not cond:
        raise DecompositionError(f"internal invariant violated: {what}")


@dataclass(frozen=True)
class TransversalDecomposition:
    """G = BH with all derived data; immutable after construction."""

    G: FiniteGroup
    H: tuple          # sorted subgroup elements (G indices)
    B: tuple          # sorted unital transversal (G indices)
    loop: FiniteLeftLoop          # induced loop on loop indices
    rep: tuple        # rep[g] in B with gH = rep[g] H
    hpart: tuple      # g = rep[g] * hpart[g]
    lmap: tuple       # lmap[i][j] in H: l(B[i], B[j]) as a G element
    sigma: tuple      # sigma[g]: permutation of loop indices
    mmap: tuple       # mmap[i][hpos] in H: m(B[i], H[hpos]) as a G element
    N: tuple          # core of H in G
    tau: tuple        # tau[g] = rep[g]^-1 hpart[g]

    @cached_property
    def bindex(self) -> dict:
        return {b: i for i, b in enumerate(self.B)}

    @cached_property
    def hpos(self) -> dict:
        return {h: i for i, h in enumerate(self.H)}

    @cached_property
    def bn_set(self) -> frozenset:
        t = self.G.table
        return frozenset(t[b][n] for b in self.B for n in self.N)

    @property
    def corefree(self) -> bool:
        return self.N == (0,)

    def rho_loop(self) -> tuple:
        """Right inversion on loop indices: x -> x \\ 1."""
        return tuple(self.loop.left_div(i, 0) for i in range(len(self.B)))

    def __repr__(self):
        return (f"TransversalDecomposition(|G|={self.G.n}, H={self.H}, B={self.B})")


def decompose(G: FiniteGroup, H: Sequence[int], B: Sequence[int]) -> TransversalDecomposition:
    """Build the decomposition and assert every derived-structure invariant.

    A non-unital left transversal is normalized to B e^-1 (with a warning);
    anything that is not a transversal at all is rejected with a witness.
    """
    H = tuple(sorted(set(H)))
    if not is_subgroup(G, H):
        raise InvalidTable("subgroup", H, "H is not a subgroup")
    B = tuple(sorted(set(B)))
    if not is_unital_transversal(G, H, B):
        normalized = normalize_transversal(G, H, B)  # raises if not a transversal
        warnings.warn(f"transversal {B} is not unital; normalized to {normalized}")
        B = normalized
    t = G.table
    n = G.n
    rep = [-1] * n
    hpart = [-1] * n
    for b in B:
        for h in H:
            g = t[b][h]
            if rep[g] != -1:
                raise InvalidTable("transversal", (b, h), f"element {g} factors twice")
            rep[g] = b
            hpart[g] = h
    _require(all(r != -1 for r in rep), "B H does not cover G")
    _require(rep[0] == 0 and hpart[0] == 0, "identity must factor as 1*1")

    bindex = {b: i for i, b in enumerate(B)}
    nb = len(B)
    loop_table = tuple(tuple(bindex[rep[t[x][y]]] for y in B) for x in B)
    loop = validate_left_loop(loop_table, labels=tuple(str(b) for b in B))
    lmap = tuple(tuple(hpart[t[x][y]] for y in B) for x in B)
    sigma = tuple(tuple(bindex[rep[t[g][y]]] for y in B) for g in range(n))
    hset = set(H)
    mmap_rows = []
    for i, x in enumerate(B):
        row = []
        for h in H:
            shx = B[sigma[h][i]]
            mval = t[t[t[G.inv(shx)][h]][x]][G.inv(h)]
            _require(mval in hset, f"m({x},{h}) escapes H")
            row.append(mval)
        mmap_rows.append(tuple(row))
    mmap = tuple(mmap_rows)
    N = core(G, H)
    tau = tuple(t[G.inv(rep[g])][hpart[g]] for g in range(n))

    D = TransversalDecomposition(G, H, B, loop, tuple(rep), tuple(hpart),
                                 lmap, sigma, mmap, N, tau)
    _assert_decomposition_invariants(D)
    return D


def _assert_decomposition_invariants(D: TransversalDecomposition):
    G, t = D.G, D.G.table
    n, nb = G.n, len(D.B)
    # l is normalized and lands in H
    hset = set(D.H)
    _require(all(v in hset for row in D.lmap for v in row), "l escapes H")
    _require(all(D.lmap[0][j] == 0 and D.lmap[j][0] == 0 for j in range(nb)),
             "l(1,x) = l(x,1) = 1 fails")
    # sigma is a homomorphism of G into Sym(B), fixing 1 on H
    S = np.asarray(D.sigma, dtype=np.int16)
    TG = G.np_table
    lhs = S[TG]                                       # sigma_{g g'}
    rhs = S[np.arange(n)[:, None, None], S[None, :, :]]  # sigma_g o sigma_g'
    _require(bool((lhs == rhs).all()), "sigma is not a homomorphism")
    _require(all(D.sigma[h][0] == 0 for h in D.H), "sigma(H) must fix the identity")
    # sigma_x = L_x and sigma_{l(x,y)} = L(x,y)
    for i, x in enumerate(D.B):
        _require(D.sigma[x] == left_translation(D.loop, i), "sigma_x != L_x")
    for i in range(nb):
        for j in range(nb):
            _require(D.sigma[D.lmap[i][j]] == inner_mapping(D.loop, i, j),
                     "sigma_l(x,y) != L(x,y)")
    # m normalizations and sigma_m = deviation
    _require(all(D.mmap[i][0] == 0 for i in range(nb)), "m(x,1) != 1")
    _require(all(D.mmap[0][k] == 0 for k in range(len(D.H))), "m(1,h) != 1")
    for i in range(nb):
        for k, h in enumerate(D.H):
            _require(D.sigma[D.mmap[i][k]] == deviation(D.loop, i, D.sigma[h]),
                     "sigma_m(x,h) != mu_x(sigma_h)")
    # kernel of sigma is the core
    ident = identity(nb)
    kernel = tuple(g for g in range(n) if D.sigma[g] == ident)
    _require(kernel == D.N, "ker(sigma) != core of H")
    # l(x, x^rho) = x x^rho in G
    rho = D.rho_loop()
    for i, x in enumerate(D.B):
        xr = D.B[rho[i]]
        _require(D.lmap[i][rho[i]] == t[x][xr], "l(x, x^rho) != x x^rho")


def factored_group_product(D: TransversalDecomposition, x: int, h: int, y: int, k: int):
    """(B-part, H-part) of the product x h y k, by the factored formula.

    Cross-checked on the spot against direct multiplication in G followed by
    the rep/H split.
    """
    if x not in D.bindex or y not in D.bindex:
        raise InvalidTable("membership", (x, y), "x and y must lie in B")
    if h not in D.hpos or k not in D.hpos:
        raise InvalidTable("membership", (h, k), "h and k must lie in H")
    t = D.G.table
    i, j = D.bindex[x], D.bindex[y]
    sj = D.sigma[h][j]
    bpart = D.B[D.loop.mul(i, sj)]
    hcomp = t[t[t[D.lmap[i][sj]][D.mmap[j][D.hpos[h]]]][h]][k]
    g = t[t[t[x][h]][y]][k]
    _require((D.rep[g], D.hpart[g]) == (bpart, hcomp),
             "factored product disagrees with direct multiplication")
    return bpart, hcomp


def check_left_inverse_transversal(D: TransversalDecomposition) -> bool:
    """Three equivalent conditions, tested independently and asserted equal:

    B is a right transversal; B^-1 is a left transversal; rho is a bijection.
    """
    G, t = D.G, D.G.table
    covered = {}
    unique = True
    for h in D.H:
        for b in D.B:
            g = t[h][b]
            unique = unique and g not in covered
            covered[g] = True
    right_transversal = unique and len(covered) == G.n
    binv = {G.inv(b) for b in D.B}
    cosets = left_cosets(G, D.H)
    binv_left = len(binv) == len(cosets) and all(
        len(binv & set(blk)) == 1 for blk in cosets)
    rho = D.rho_loop()
    rho_bijective = sorted(rho) == list(range(len(D.B)))
    _require(right_transversal == binv_left == rho_bijective,
             "left-inverse characterizations disagree")
    return rho_bijective


G_CONDITION_NAMES = ("G-LIP", "G-LAP", "G-Bol", "G-W", "G-Br",
                     "G-PsAl", "G-Al", "G-LC", "G-LCC", "twisted")


@dataclass
class GConditionReport:
    flags: dict
    witnesses: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> bool:
        return self.flags[name]


def check_G_conditions(D: TransversalDecomposition) -> GConditionReport:
    """Element-wise containment conditions on B inside G, with N = core(H).

    G-LIP: B^-1 in BN; G-LAP: squares of B in BN; G-Bol: xBx in BN;
    G-W: x B^2 x in BN; G-Br: x y^2 x in (x.y)^2 N; G-PsAl: for each h some
    c in B has c h B h^-1 in BN; G-Al: h B h^-1 in BN; G-LC: x^2 B in BN;
    G-LCC: x B x^-1 in BN; twisted: x B x in B with no core correction.
    """
    G, t = D.G, D.G.table
    BN = D.bn_set
    flags, wit = {}, {}

    def set_flag(name, witness):
        flags[name] = witness is None
        if witness is not None:
            wit[name] = witness

    set_flag("G-LIP", next(((x,) for x in D.B if G.inv(x) not in BN), None))
    set_flag("G-LAP", next(((x,) for x in D.B if t[x][x] not in BN), None))
    set_flag("G-Bol", next(((x, y) for x in D.B for y in D.B
                            if t[t[x][y]][x] not in BN), None))
    set_flag("G-W", next(((x, y) for x in D.B for y in D.B
                          if t[t[x][t[y][y]]][x] not in BN), None))

    w = None
    nset = set(D.N)
    for x in D.B:
        for y in D.B:
            xyyx = t[t[t[x][y]][y]][x]
            xy_loop = D.B[D.loop.mul(D.bindex[x], D.bindex[y])]
            sq = t[xy_loop][xy_loop]
            if t[G.inv(sq)][xyyx] not in nset:
                w = (x, y)
                break
        if w:
            break
    set_flag("G-Br", w)

    w = None
    for h in D.H:
        hi = G.inv(h)
        if not any(all(t[t[t[c][h]][x]][hi] in BN for x in D.B) for c in D.B):
            w = (h,)
            break
    set_flag("G-PsAl", w)
    set_flag("G-Al", next(((h, x) for h in D.H for x in D.B
                           if t[t[h][x]][G.inv(h)] not in BN), None))
    set_flag("G-LC", next(((x, y) for x in D.B for y in D.B
                           if t[t[x][x]][y] not in BN), None))
    set_flag("G-LCC", next(((x, y) for x in D.B for y in D.B
                            if t[t[x][y]][G.inv(x)] not in BN), None))
    bset = set(D.B)
    set_flag("twisted", next(((x, y) for x in D.B for y in D.B
                              if t[t[x][y]][x] not in bset), None))
    return GConditionReport(flags, wit)


def quotient_decomposition(D: TransversalDecomposition, K: Sequence[int]) -> TransversalDecomposition:
    """Decomposition of G/K with subgroup H/K and transversal {xK : x in B}.

    Requires K normal in G and contained in H.  Asserts that the projection
    is compatible: xK .K yK = (x.y)K and l_K(xK, yK) = l(x, y)K, so the
    induced loop is an isomorphic copy of D's.
    """
    K = tuple(sorted(set(K)))
    if not set(K) <= set(D.H):
        raise InvalidTable("subgroup", K, "K must be contained in H")
    Q, proj = quotient(D.G, K)  # validates normality
    Hq = tuple(sorted({proj[h] for h in D.H}))
    Bq = tuple(sorted({proj[b] for b in D.B}))
    _require(len(Bq) == len(D.B), "projection is not injective on B")
    Dq = decompose(Q, Hq, Bq)
    mp = tuple(Dq.bindex[proj[b]] for b in D.B)
    nb = len(D.B)
    for i in range(nb):
        for j in range(nb):
            _require(mp[D.loop.mul(i, j)] == Dq.loop.mul(mp[i], mp[j]),
                     "quotient loop is not the projected loop")
            _require(proj[D.lmap[i][j]] == Dq.lmap[mp[i]][mp[j]],
                     "l_K(xK, yK) != l(x, y)K")
    if K == D.N:
        _require(Dq.corefree, "core must vanish in G/N")
    return Dq


def subgroup_respects(D: TransversalDecomposition, G1: Sequence[int]) -> Optional[TransversalDecomposition]:
    """Sub-decomposition on a subgroup G1, iff G1 respects the factorization.

    G1 respects G = BH when every g in G1 has both factors in G1; then
    G1 = (B cap G1)(H cap G1) and the induced loop is a subloop of D's.
    """
    G1 = tuple(sorted(set(G1)))
    if not is_subgroup(D.G, G1):
        raise InvalidTable("subgroup", G1, "G1 is not a subgroup")
    g1set = set(G1)
    if any(D.rep[g] not in g1set for g in G1):
        return None
    sub = subgroup_as_group(D.G, G1)
    pos = {g: i for i, g in enumerate(G1)}
    H1 = tuple(pos[h] for h in D.H if h in g1set)
    B1 = tuple(pos[b] for b in D.B if b in g1set)
    D1 = decompose(sub, H1, B1)
    lift = tuple(D.bindex[G1[D1.B[i]]] for i in range(len(D1.B)))
    for i in range(len(D1.B)):
        for j in range(len(D1.B)):
            _require(lift[D1.loop.mul(i, j)] == D.loop.mul(lift[i], lift[j]),
                     "sub-decomposition loop is not a subloop")
    return D1


# --- theorem verifiers -----------------------------------------------------

_IDENT_ROWS = (("LIP", "G-LIP"), ("LAP", "G-LAP"), ("Bol", "G-Bol"),
               ("W", "G-W"), ("Bruck1", "G-Br"), ("LC", "G-LC"), ("LCC", "G-LCC"))


@dataclass
class InternalIdentReport:
    rows: dict          # ident -> (g_cond, gn_cond, loop_ident)
    aut_rows: dict      # name -> (lhs, rhs)
    pseudo_lemma: dict  # h -> ((i), (ii), (iii)) booleans, both lemma parts
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_internal_idents(D: TransversalDecomposition) -> InternalIdentReport:
    """All three-way equivalences: G-condition, G/N-condition, loop identity.

    Covers the five theorem rows (LIP, LAP, Bol, W, Br) plus the LC/LCC
    extension rows, the four PsA_l/A_l equivalences, and both parts of the
    companion lemma per h in H.  Violations (expected never) are returned,
    not raised, so sweeps can report recipes.
    """
    gc = check_G_conditions(D)
    Dq = quotient_decomposition(D, D.N)
    gq = check_G_conditions(Dq)
    rep = identities.identity_report(
        D.loop, ("LIP", "LAP", "Bol", "W", "Bruck1", "LC", "LCC", "Al", "PsAl"))
    violations = []
    rows = {}
    for ident, gname in _IDENT_ROWS:
        triple = (gc[gname], gq[gname], rep[ident])
        rows[ident] = triple
        if len(set(triple)) != 1:
            violations.append((f"internal-idents:{ident}", triple))

    G0 = generated_subgroup(D.G, D.B)
    D0 = subgroup_respects(D, G0)
    _require(D0 is not None, "the subgroup generated by B must respect G = BH")
    _require(D0.loop.table == D.loop.table, "loop of <B> must equal the loop of D")
    g0 = check_G_conditions(D0)
    aut_rows = {
        "G-PsAl<->G/N-PsAl": (gc["G-PsAl"], gq["G-PsAl"]),
        "G-Al<->G/N-Al": (gc["G-Al"], gq["G-Al"]),
        "G0-PsAl<->loop-PsAl": (g0["G-PsAl"], rep["PsAl"]),
        "G0-Al<->loop-Al": (g0["G-Al"], rep["Al"]),
    }
    for name, (lhs, rhs) in aut_rows.items():
        if lhs != rhs:
            violations.append((f"aut-char:{name}", (lhs, rhs)))

    # companion lemma, parts (1) and (2), per h
    G, t = D.G, D.G.table
    BN = D.bn_set
    nset = set(D.N)
    nb = len(D.B)
    pseudo_lemma = {}
    from .finloop import is_automorphism as _ia
    from .finloop import pseudo_automorphism_companions as _pc
    for kpos, h in enumerate(D.H):
        hi = G.inv(h)
        sig_h = D.sigma[h]
        i1 = bool(_pc(D.loop, sig_h))
        i2 = any(all(t[t[t[c][h]][x]][hi] in BN for x in D.B) for c in D.B)
        i3 = any(all(t[D.lmap[ci][sig_h[xi]]][D.mmap[xi][kpos]] in nset
                     for xi in range(nb)) for ci in range(nb))
        a1 = _ia(D.loop, sig_h)
        a2 = all(t[t[h][x]][hi] in BN for x in D.B)
        a3 = all(D.mmap[xi][kpos] in nset for xi in range(nb))
        pseudo_lemma[h] = ((i1, i2, i3), (a1, a2, a3))
        if len({i1, i2, i3}) != 1:
            violations.append((f"pseudo-lemma-1:h={h}", (i1, i2, i3)))
        if len({a1, a2, a3}) != 1:
            violations.append((f"pseudo-lemma-2:h={h}", (a1, a2, a3)))
    return InternalIdentReport(rows, aut_rows, pseudo_lemma, violations)


@dataclass
class TauReport:
    flags: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def tau_analysis(D: TransversalDecomposition) -> TauReport:
    """Everything the involution candidate tau: xh -> x^-1 h encodes.

    Injectivity/surjectivity against rho, the tau^2 = I criterion, the
    semi-automorphism and automorphism characterizations, and the
    squares/strong-Bruck identities; asserts each stated biconditional and
    returns violations (expected none).
    """
    G = D.G
    n = G.n
    T = G.np_table
    TAU = np.asarray(D.tau, dtype=np.int16)
    rho = D.rho_loop()
    t = G.table
    flags, violations = {}, []

    def claim(name, lhs, rhs):
        flags[name] = (lhs, rhs)
        if lhs != rhs:
            violations.append((f"tau:{name}", (lhs, rhs)))

    inj_tau = len(set(D.tau)) == n
    surj_tau = set(D.tau) == set(range(n))
    inj_rho = len(set(rho)) == len(rho)
    surj_rho = set(rho) == set(range(len(D.B)))
    claim("injective", inj_tau, inj_rho)
    claim("surjective", surj_tau, surj_rho)
    claim("bijective", inj_tau and surj_tau, inj_rho and surj_rho)

    tau_sq_id = all(D.tau[D.tau[g]] == g for g in range(n))
    xcond = all(
        t[t[t[x][D.B[rho[i]]]][D.B[rho[i]]]][x] == 0
        for i, x in enumerate(D.B))
    claim("tau2=I", tau_sq_id, xcond)
    if tau_sq_id:
        two_sided = surj_rho and inj_rho and all(rho[rho[i]] == i for i in range(len(D.B)))
        claim("tau2=>two-sided-inverses", two_sided, True)

    ar = np.arange(n)
    g1g2g1 = T[T, ar[:, None]]
    semi = bool((TAU[g1g2g1] == T[T[TAU[:, None], TAU[None, :]], TAU[:, None]]).all())
    flags["semi-automorphism"] = semi
    if semi:
        sq_ok = all(
            t[t[t[x][y]][x]][t[t[x][y]][x]] ==
            t[D.B[D.loop.mul(i, D.loop.mul(j, i))]][D.B[D.loop.mul(i, D.loop.mul(j, i))]]
            for i, x in enumerate(D.B) for j, y in enumerate(D.B))
        claim("squares-under-semi", sq_ok, True)

    auto = bool((TAU[T] == T[TAU[:, None], TAU[None, :]]).all())
    flags["automorphism"] = auto

    strong_br = all(
        t[t[t[x][y]][y]][x] ==
        t[D.B[D.loop.mul(i, j)]][D.B[D.loop.mul(i, j)]]
        for i, x in enumerate(D.B) for j, y in enumerate(D.B))
    sig_square = all(
        t[D.B[D.sigma[h][j]]][D.B[D.sigma[h][j]]] == t[t[h][t[y][y]]][G.inv(h)]
        for j, y in enumerate(D.B) for h in D.H)
    stronga = all(
        t[D.B[ij]][D.B[ij]] == t[t[t[t[x][h]][t[y][y]]][G.inv(h)]][x]
        for i, x in enumerate(D.B) for h in D.H
        for j, y in enumerate(D.B)
        for ij in (D.loop.mul(i, D.sigma[h][j]),))
    flags["strong-br"] = strong_br
    flags["sig-square"] = sig_square
    claim("automorphism<->strong-br&sig-square", auto, strong_br and sig_square)
    claim("automorphism<->stronga", auto, stronga)
    if strong_br:
        br2 = all(
            t[t[G.inv(x)][t[y][y]]][G.inv(x)] ==
            t[D.B[D.loop.left_div(i, j)]][D.B[D.loop.left_div(i, j)]]
            for i, x in enumerate(D.B) for j, y in enumerate(D.B))
        claim("strong-br=>strong-br2", br2, True)

    gc = check_G_conditions(D)
    generated = generated_subgroup(D.G, D.B) == tuple(range(n))
    flags["generated"] = generated
    if generated:
        claim("tau-aut-generated", auto, strong_br)
    if D.corefree and gc["G-Al"]:
        claim("tau-aut-corefree-Al", auto, strong_br)

    squares_inj = len({t[g][g] for g in range(n)}) == n
    flags["G-squaring-injective"] = squares_inj
    if squares_inj and semi:
        claim("semi+inj-squares=>Bol", identities.check_bol(D.loop)[0], True)

    BN = D.bn_set
    trivial_via_tau = all(
        t[t[g][b]][G.inv(D.tau[g])] in BN for g in range(n) for b in D.B)
    claim("gB.tau(g)^-1<->Bol&Al", trivial_via_tau, gc["G-Bol"] and gc["G-Al"])
    return TauReport(flags, violations)


@dataclass
class SequenceReport:
    flags: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def internal_sequence_check(D: TransversalDecomposition, iso_search_limit: int = 24) -> SequenceReport:
    """Exactness bookkeeping: H/N = sigma(H) and G/N = B x| sigma(H).

    Verifies the explicit maps h ker(sigma) -> sigma_h and
    x (h ker sigma) -> (x, sigma_h) as isomorphisms, runs the generic
    isomorphism search as an extra witness for small orders, and checks the
    multiplication-group criterion: G = LMlt(loop) iff N = 1 and <B> = G.
    """
    G, t = D.G, D.G.table
    n = G.n
    flags, violations = {}, []

    sig_els_in_order = []
    seen = set()
    for h in D.H:
        p = D.sigma[h]
        if p not in seen:
            seen.add(p)
            sig_els_in_order.append(p)
    sigma_H = PermGroup(len(D.B), tuple(sig_els_in_order), tuple(sig_els_in_order))
    _require(sigma_H.elements[0] == identity(len(D.B)), "sigma_1 must be I")

    Hgrp = subgroup_as_group(G, D.H)
    hpos = D.hpos
    Kpos = tuple(hpos[x] for x in D.N)
    HN, projH = quotient(Hgrp, Kpos)
    # h ker(sigma) -> sigma_h: well-defined, bijective, multiplicative
    image_of_coset = {}
    well_defined = True
    for k, h in enumerate(D.H):
        c = projH[k]
        if c in image_of_coset and image_of_coset[c] != D.sigma[h]:
            well_defined = False
        image_of_coset[c] = D.sigma[h]
    bijective = len(set(image_of_coset.values())) == HN.n == len(sigma_H)
    multiplicative = all(
        image_of_coset[HN.mul(a, b)] ==
        compose(image_of_coset[a], image_of_coset[b])
        for a in range(HN.n) for b in range(HN.n))
    flags["H/N~sigma(H)"] = well_defined and bijective and multiplicative
    if not flags["H/N~sigma(H)"]:
        violations.append(("sequence:H/N~sigma(H)",
                           (well_defined, bijective, multiplicative)))

    P = standard_product(D.loop, sigma_H)
    Q, proj = quotient(G, D.N)
    ms = len(sigma_H)
    pos_sigma = sigma_H.position
    psi = [-1] * Q.n
    well_defined = True
    for g in range(n):
        target = D.bindex[D.rep[g]] * ms + pos_sigma[D.sigma[D.hpart[g]]]
        if psi[proj[g]] == -1:
            psi[proj[g]] = target
        elif psi[proj[g]] != target:
            well_defined = False
    bijective = sorted(psi) == list(range(P.group.n)) and Q.n == P.group.n
    homomorphic = well_defined and bijective and all(
        psi[Q.mul(a, b)] == P.group.mul(psi[a], psi[b])
        for a in range(Q.n) for b in range(Q.n))
    flags["G/N~BxSigmaH"] = well_defined and bijective and homomorphic
    if not flags["G/N~BxSigmaH"]:
        violations.append(("sequence:G/N~BxSigmaH",
                           (well_defined, bijective, homomorphic)))
    if Q.n <= iso_search_limit:
        from .fingroup import are_isomorphic
        found = are_isomorphic(Q, P.group)
        flags["G/N~BxSigmaH-search"] = found is not None
        if found is None:
            violations.append(("sequence:iso-search", Q.n))

    lm = lmlt(D.loop)
    iso_to_lmlt = len(lm) == n
    rhs = D.corefree and generated_subgroup(G, D.B) == tuple(range(n))
    flags["G~LMlt<->corefree&generated"] = (iso_to_lmlt, rhs)
    if iso_to_lmlt != rhs:
        violations.append(("sequence:G~LMlt", (iso_to_lmlt, rhs)))
    if iso_to_lmlt:
        _require(len({D.sigma[g] for g in range(n)}) == n and
                 set(D.sigma) == set(lm.elements),
                 "sigma must realize the isomorphism onto LMlt")

    if len(sigma_H) == 1:
        # degenerate sequence 1 -> H -> G -> B -> 1: the loop is a group
        # isomorphic to G/H via x -> xH
        _require(core(G, D.H) == D.H, "sigma(H) trivial forces H normal")
        QH, projQH = quotient(G, D.H)
        okdeg = all(
            projQH[D.B[D.loop.mul(i, j)]] == QH.mul(projQH[D.B[i]], projQH[D.B[j]])
            for i in range(len(D.B)) for j in range(len(D.B)))
        okdeg = okdeg and len({projQH[b] for b in D.B}) == QH.n
        flags["degenerate-sequence"] = okdeg
        if not okdeg:
            violations.append(("sequence:degenerate", ()))
    return SequenceReport(flags, violations)


def lmlt_decomposition(B: FiniteLeftLoop) -> TransversalDecomposition:
    """Decomposition LMlt(B) = L(B) LMlt_1(B), the corefree realization of B.

    tau on it is exactly L_x phi -> L_x^-1 phi.
    """
    Gp = lmlt(B)
    Gfin, labeling = to_cayley(Gp)
    pos = Gp.position
    Bidx = tuple(sorted(pos[left_translation(B, x)] for x in range(B.n)))
    Hidx = tuple(sorted(i for i, p in enumerate(labeling) if p[0] == 0))
    return decompose(Gfin, Hidx, Bidx)


def to_external_spec(D: TransversalDecomposition) -> ExternalSpec:
    """Repackage the internal data (loop, H, sigma|H, l, m) as an ExternalSpec."""
    Hgrp = subgroup_as_group(D.G, D.H)
    hpos = D.hpos
    sigma = tuple(D.sigma[h] for h in D.H)
    l = tuple(tuple(hpos[v] for v in row) for row in D.lmap)
    m = tuple(tuple(hpos[v] for v in row) for row in D.mmap)
    return ExternalSpec(D.loop, Hgrp, sigma, l, m)


def triangular_decomposition(p: int, n: int = 3) -> TransversalDecomposition:
    """T(3, F_p) = A(3, F_p) M(3, F_p): unitriangular matrices over F_p.

    T(x,y,z) is indexed x p^2 + y p + z.  H = M (the center), B = A; the
    induced loop is F_p x F_p under addition while l is the symplectic form
    (x1 y2 - x2 y1)/2, so l is nontrivial although sigma is trivial: the
    standing counterexample to sigma being injective.  p must be an odd
    prime so that 1/2 exists.
    """
    if n != 3:
        raise InvalidTable("unsupported", (n,), "only the 3x3 case is built")
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime (got {p})")
    p2 = p * p

    def idx(x, y, z):
        return x * p2 + y * p + z

    table = []
    for x in range(p):
        for y in range(p):
            for z in range(p):
                row = []
                for x2 in range(p):
                    for y2 in range(p):
                        for z2 in range(p):
                            row.append(idx((x + x2) % p, (y + y2 + x * z2) % p,
                                           (z + z2) % p))
                table.append(tuple(row))
    G = FiniteGroup(tuple(table), name=f"T(3,F{p})")
    inv2 = (p + 1) // 2
    H = tuple(sorted(idx(0, c, 0) for c in range(p)))
    B = tuple(sorted(idx(x, (x * z * inv2) % p, z) for x in range(p) for z in range(p)))
    D = decompose(G, H, B)

    # the loop is (F_p)^2 under addition, and l is the symplectic form
    coords = {b: (b // p2, b % p) for b in D.B}
    for i, b in enumerate(D.B):
        x1, x2 = coords[b]
        for j, c in enumerate(D.B):
            y1, y2 = coords[c]
            s = D.B[D.loop.mul(i, j)]
            _require(coords[s] == ((x1 + y1) % p, (x2 + y2) % p),
                     "induced loop is not coordinatewise addition")
            want = idx(0, ((x1 * y2 - x2 * y1) * inv2) % p, 0)
            _require(D.lmap[i][j] == want, "l is not the halved symplectic form")
    _require(core(G, H) == H, "M(3,F) must be normal (it is the center)")
    ident = identity(len(D.B))
    _require(all(D.sigma[h] == ident for h in D.H), "sigma must be trivial on H")
    _require(any(v != 0 for row in D.lmap for v in row), "l must be nontrivial")
    return D
