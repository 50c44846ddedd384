"""Standard and external semidirect products of a left loop with a group.

Standard product: pairs (x, phi) in B x H for a transassociant H <= Sym_1(B),
multiplied by

    (x, phi)(y, psi) = (x.phi(y), L(x, phi(y)) mu_y(phi) phi psi).

External product: H is an abstract group acting through sigma: H -> Sym_1(B)
together with tables l: BxB -> H and m: BxH -> H subject to the coherence
conditions S1-S9; the product is

    (x, h)(y, k) = (x.sigma_h(y), l(x, sigma_h(y)) m(y, h) h k).

The general formulas above are always the executed path; the special-case
simplifications are only reported, never substituted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .fingroup import FiniteGroup, InvalidTable, validate_group
from .finloop import (FiniteLeftLoop, deviation, inner_mapping, is_automorphism,
                      is_transassociant, left_translation,
                      pseudo_automorphism_companions)
from .identities import check_Al, check_pseudo_Al
from .perm import Perm, PermGroup, compose, identity, inverse


class TransassociantError(ValueError):
    def __init__(self, witness, message):
        super().__init__(f"{message} (witness {witness})")
        self.witness = witness


@dataclass(frozen=True)
class StdProduct:
    """Cayley table of B x| H plus the pair labeling (x, phi) per index."""

    group: FiniteGroup
    pairs: tuple  # pairs[i] = (x, phi); index convention i = x*|H| + h

    @property
    def n(self) -> int:
        return self.group.n


def pair_index(x: int, hpos: int, mh: int) -> int:
    return x * mh + hpos


def standard_product(B: FiniteLeftLoop, H: PermGroup, check: bool = True) -> StdProduct:
    """Standard semidirect product B x| H; H must be a transassociant.

    The identity is (0, I) at index 0.  With check=False the transassociant
    precondition is not verified up front, but a second component escaping H
    still raises (that escape is exactly failure of transassociance).
    """
    if H.degree != B.n:
        raise TransassociantError(("degree", H.degree), "H acts on the wrong carrier")
    if check:
        ok, witness = is_transassociant(B, H)
        if not ok:
            raise TransassociantError(witness, "H is not a transassociant of B")
    mh = len(H)
    pos = H.position
    t = B.table
    inner = [[inner_mapping(B, x, y) for y in range(B.n)] for x in range(B.n)]
    dev = [[deviation(B, y, phi) for phi in H.elements] for y in range(B.n)]
    phi2 = [[compose(a, b) for b in H.elements] for a in H.elements]
    rows = []
    for x in range(B.n):
        for h, phi in enumerate(H.elements):
            row = []
            for y in range(B.n):
                fy = phi[y]
                fc = t[x][fy]
                head = compose(inner[x][fy], dev[y][h])
                for k in range(mh):
                    second = compose(head, phi2[h][k])
                    spos = pos.get(second)
                    if spos is None:
                        raise TransassociantError(
                            ("second-component", x, phi, y, H.elements[k]),
                            "product's H-component escapes H")
                    row.append(pair_index(fc, spos, mh))
            rows.append(tuple(row))
    pairs = tuple((x, phi) for x in range(B.n) for phi in H.elements)
    labels = tuple(f"({x},{''.join(map(str, phi))})" for x, phi in pairs)
    group = FiniteGroup(tuple(rows), labels=labels)
    return StdProduct(group, pairs)


def specialize_product_form(B: FiniteLeftLoop, H: PermGroup) -> str:
    """Which simplification of the product formula applies (reporting only).

    "classical": B a group, H <= Aut(B); "rotary": B a group; "affine": B an
    A_l loop with H <= Aut(B); "pseudo-affine": B pseudo-A_l with
    H <= PsAut(B); otherwise "general".
    """
    h_in_aut = all(is_automorphism(B, phi) for phi in H.elements)
    if B.is_group:
        return "classical" if h_in_aut else "rotary"
    if h_in_aut and check_Al(B)[0]:
        return "affine"
    if check_pseudo_Al(B)[0] and all(
            pseudo_automorphism_companions(B, phi) for phi in H.elements):
        return "pseudo-affine"
    return "general"


# --- external products ----------------------------------------------------

@dataclass(frozen=True)
class ExternalSpec:
    """Data (B, H, sigma, l, m) for an external semidirect product.

    sigma[h] is a permutation of B's carrier; l[x][y] and m[x][h] are
    H-element indices.
    """

    B: FiniteLeftLoop
    H: FiniteGroup
    sigma: tuple
    l: tuple
    m: tuple

    def __post_init__(self):
        n, nh = self.B.n, self.H.n
        if len(self.sigma) != nh or any(len(s) != n for s in self.sigma):
            raise InvalidTable("shape", ("sigma",), f"sigma must be {nh} permutations of degree {n}")
        if len(self.l) != n or any(len(r) != n for r in self.l):
            raise InvalidTable("shape", ("l",), f"l must be {n}x{n}")
        if len(self.m) != n or any(len(r) != nh for r in self.m):
            raise InvalidTable("shape", ("m",), f"m must be {n}x{nh}")
        flat = [v for r in self.l for v in r] + [v for r in self.m for v in r]
        if any(not 0 <= v < nh for v in flat):
            raise InvalidTable("range", ("l/m",), "l and m entries must index H")
        for s in self.sigma:
            if sorted(s) != list(range(n)):
                raise InvalidTable("bijection", tuple(s), "sigma entries must be permutations")


CONDITION_NAMES = ("sigma-hom", "sigma-fixes-1", "S1", "S2", "S3", "S4", "S5",
                   "S6", "S7", "S8", "S9", "TC")


@dataclass
class ExternalValidation:
    conditions: dict      # name -> bool
    witnesses: dict       # name -> first failing tuple
    lemma_consistent: bool  # TC observed equal to S7 and S8 and S9

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def first_failure(self) -> Optional[str]:
        for name in CONDITION_NAMES:
            if not self.conditions[name]:
                return name
        return None


def _external_arrays(spec: ExternalSpec):
    n, nh = spec.B.n, spec.H.n
    LT = np.asarray(spec.B.table, dtype=np.int16)
    HT = np.asarray(spec.H.table, dtype=np.int16)
    HINV = np.asarray(spec.H.inverses, dtype=np.int16)
    SIG = np.asarray(spec.sigma, dtype=np.int16)
    LA = np.asarray(spec.l, dtype=np.int16)
    MA = np.asarray(spec.m, dtype=np.int16)
    return n, nh, LT, HT, HINV, SIG, LA, MA


def validate_external(spec: ExternalSpec) -> ExternalValidation:
    """Evaluate sigma's homomorphism property, S1-S9, and TC over all tuples.

    TC is evaluated independently of S7-S9 so the equivalence TC <=>
    (S7 and S8 and S9) is observed, not assumed; `lemma_consistent` records it.
    Witnesses are lexicographic minima over the stated tuple order.
    """
    n, nh, LT, HT, HINV, SIG, LA, MA = _external_arrays(spec)
    B = spec.B
    cond, wit = {}, {}

    def record(name, witness):
        cond[name] = witness is None
        if witness is not None:
            wit[name] = witness

    w = None
    for h in range(nh):
        for k in range(nh):
            if tuple(SIG[HT[h, k]]) != compose(tuple(SIG[h]), tuple(SIG[k])):
                w = (h, k)
                break
        if w:
            break
    record("sigma-hom", w)
    w = next(((h,) for h in range(nh) if SIG[h][0] != 0), None)
    record("sigma-fixes-1", w)

    w = None
    for x in range(n):
        for y in range(n):
            if tuple(SIG[LA[x, y]]) != inner_mapping(B, x, y):
                w = (x, y)
                break
        if w:
            break
    record("S1", w)
    w = None
    for x in range(n):
        for h in range(nh):
            if tuple(SIG[MA[x, h]]) != deviation(B, x, tuple(SIG[h])):
                w = (x, h)
                break
        if w:
            break
    record("S2", w)

    record("S3", next(((x,) for x in range(n) if LA[0, x] != 0), None))
    record("S4", next(((x,) for x in range(n) if MA[x, 0] != 0), None))
    record("S5", next(((x,) for x in range(n) if LA[x, 0] != 0), None))
    record("S6", next(((h,) for h in range(nh) if MA[0, h] != 0), None))

    # mu[x, h] = deviation of sigma_h at x, as an image table
    MU = np.empty((n, nh, n), dtype=np.int16)
    for x in range(n):
        for h in range(nh):
            MU[x, h] = deviation(B, x, tuple(SIG[h]))
    INNER = np.empty((n, n, n), dtype=np.int16)
    for x in range(n):
        for y in range(n):
            INNER[x, y] = inner_mapping(B, x, y)

    ar = np.arange(n, dtype=np.int16)
    X, Y, Z = ar[:, None, None], ar[None, :, None], ar[None, None, :]
    xy = LT[X, Y]
    lxy = LA[X, Y]
    lhs = HT[HT[LA[xy, INNER[X, Y, Z]], MA[Z, lxy]], lxy]
    rhs = HT[LA[X, LT[Y, Z]], LA[Y, Z]]
    bad = np.argwhere(lhs != rhs)
    record("S7", tuple(map(int, bad[0])) if len(bad) else None)

    arh = np.arange(nh, dtype=np.int16)
    Xh, Hh, Kh = ar[:, None, None], arh[None, :, None], arh[None, None, :]
    lhs = MA[Xh, HT[Hh, Kh]]
    rhs = HT[HT[HT[MA[SIG[Kh, Xh], Hh], Hh], MA[Xh, Kh]], HINV[Hh]]
    bad = np.argwhere(lhs != rhs)
    record("S8", tuple(map(int, bad[0])) if len(bad) else None)

    Xs, Ys, Hs = ar[:, None, None], ar[None, :, None], arh[None, None, :]
    mxh = MA[Xs, Hs]
    arg2 = MU[Xs, Hs, SIG[Hs, Ys]]
    lhs = HT[HT[LA[SIG[Hs, Xs], arg2], MA[Ys, HT[mxh, Hs]]], mxh]
    rhs = HT[HT[HT[MA[LT[Xs, Ys], Hs], Hs], LA[Xs, Ys]], HINV[Hs]]
    bad = np.argwhere(lhs != rhs)
    record("S9", tuple(map(int, bad[0])) if len(bad) else None)

    # TC, chunked over x so witnesses come out in (x, y, z, h, k) order
    Yt = ar[:, None, None, None]
    Zt = ar[None, :, None, None]
    Ht = arh[None, None, :, None]
    Kt = arh[None, None, None, :]
    tc_witness = None
    for x in range(n):
        shy = SIG[Ht, Yt]
        u = LT[x, shy]
        lxs = LA[x, shy]
        myh = MA[Yt, Ht]
        hk = HT[Ht, Kt]
        q = MU[Yt, Ht, SIG[hk, Zt]]
        w1 = INNER[x, shy, q]
        w2 = HT[HT[lxs, myh], hk]
        lhs = HT[HT[HT[LA[u, w1], MA[Zt, w2]], lxs], myh]
        skz = SIG[Kt, Zt]
        rhs = HT[HT[HT[HT[HT[LA[x, LT[shy, q]], MA[LT[Yt, skz], Ht]], Ht],
                      LA[Yt, skz]], MA[Zt, Kt]], HINV[Ht]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            y, z, h, k = map(int, bad[0])
            tc_witness = (x, y, z, h, k)
            break
    record("TC", tc_witness)

    lemma_consistent = cond["TC"] == (cond["S7"] and cond["S8"] and cond["S9"])
    return ExternalValidation(cond, wit, lemma_consistent)


@dataclass(frozen=True)
class ExternalProduct:
    group: FiniteGroup
    pairs: tuple  # pairs[i] = (x, h); index convention i = x*|H| + h
    spec: ExternalSpec


def external_product(spec: ExternalSpec, check: bool = True) -> ExternalProduct:
    """Cayley table of B x|_(sigma,l,m) H; identity (0, e) at index 0.

    Verifies the inverse formulas: (x, e)^-1 = (x^rho, l(x, x^rho)^-1) and in
    general (x, h)^-1 = (sigma_{h^-1}(x^rho), m(x^rho, h^-1) h^-1 l(x, x^rho)^-1).
    """
    if check:
        v = validate_external(spec)
        if not v.ok:
            name = v.first_failure()
            raise InvalidTable(name, v.witnesses.get(name, ()),
                               f"external spec violates {name}")
    n, nh, LT, HT, HINV, SIG, LA, MA = _external_arrays(spec)
    ar = np.arange(n, dtype=np.int16)
    arh = np.arange(nh, dtype=np.int16)
    X = ar[:, None, None, None]
    Hx = arh[None, :, None, None]
    Y = ar[None, None, :, None]
    K = arh[None, None, None, :]
    sy = SIG[Hx, Y]
    fc = LT[X, sy]
    hc = HT[HT[HT[LA[X, sy], MA[Y, Hx]], Hx], K]
    mm = n * nh
    table = (fc.astype(np.int32) * nh + hc).reshape(mm, mm)
    pairs = tuple((x, h) for x in range(n) for h in range(nh))
    labels = tuple(f"({x},{h})" for x, h in pairs)
    group = FiniteGroup(tuple(tuple(int(v) for v in row) for row in table),
                        labels=labels)
    # inverse formulas from the construction
    rho = [spec.B.left_div(x, 0) for x in range(n)]
    ginv = group.inverses
    for x in range(n):
        lxr = int(LA[x, rho[x]])
        expect = pair_index(rho[x], spec.H.inv(lxr), nh)
        got = ginv[pair_index(x, 0, nh)]
        if got != expect:
            raise InvalidTable("inverse-formula", (x,),
                               f"(x,e)^-1 mismatch: {got} vs {expect}")
        for h in range(nh):
            hi = spec.H.inv(h)
            bpart = int(SIG[hi][rho[x]])
            hpart = spec.H.mul(spec.H.mul(int(MA[rho[x], hi]), hi), spec.H.inv(lxr))
            if ginv[pair_index(x, h, nh)] != pair_index(bpart, hpart, nh):
                raise InvalidTable("inverse-formula", (x, h), "general inverse mismatch")
    return ExternalProduct(group, pairs, spec)


def sigma_image(spec: ExternalSpec) -> PermGroup:
    """sigma(H) as a permutation group, identity first, deduplicated in H order."""
    seen = {}
    for h in range(spec.H.n):
        p = tuple(spec.sigma[h])
        if p not in seen:
            seen[p] = h
    els = sorted(seen, key=lambda p: seen[p])
    e = identity(spec.B.n)
    if e in els:
        els.remove(e)
    els = (e,) + tuple(els)
    return PermGroup(spec.B.n, els, els)


def external_projection(spec: ExternalSpec, check: bool = True):
    """Epimorphism B x|_(sigma,l,m) H -> B x| sigma(H): (x, h) -> (x, sigma_h).

    Returns (external, standard, mapping, kernel); kernel = {1} x ker(sigma).
    """
    ext = external_product(spec, check=check)
    img = sigma_image(spec)
    ok, witness = is_transassociant(spec.B, img)
    if not ok:
        raise TransassociantError(witness, "sigma(H) fails transassociance; S1/S2 must have failed")
    std = standard_product(spec.B, img)
    pos = img.position
    nh, ms = spec.H.n, len(img)
    mapping = tuple(pair_index(x, pos[tuple(spec.sigma[h])], ms)
                    for x in range(spec.B.n) for h in range(nh))
    te, ts = ext.group.table, std.group.table
    mm = ext.group.n
    for i in range(mm):
        for j in range(mm):
            if mapping[te[i][j]] != ts[mapping[i]][mapping[j]]:
                raise InvalidTable("projection", (i, j), "(x,h) -> (x, sigma_h) not a homomorphism")
    if len(set(mapping)) != std.group.n:
        raise InvalidTable("projection", (), "projection is not onto the standard product")
    e = identity(spec.B.n)
    kernel = tuple(pair_index(0, h, nh) for h in range(nh) if tuple(spec.sigma[h]) == e)
    assert sorted(i for i in range(mm) if mapping[i] == 0) == sorted(kernel)
    return ext, std, mapping, kernel


def heisenberg_spec(p: int) -> ExternalSpec:
    """External spec for F_p^2 x| F_p with l((x1,x2),(y1,y2)) = (x1 y2 - x2 y1)/2.

    sigma and m are trivial; the product realizes the group of strictly upper
    unitriangular 3x3 matrices over F_p.  Needs 1/2, so p must be an odd prime.
    """
    from .fingroup import cyclic_group, is_prime
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime (got {p})")
    inv2 = (p + 1) // 2
    n = p * p
    table = tuple(
        tuple(((x1 + y1) % p) * p + ((x2 + y2) % p)
              for y1 in range(p) for y2 in range(p))
        for x1 in range(p) for x2 in range(p)
    )
    B = FiniteLeftLoop(table)
    H = cyclic_group(p)
    ident = identity(n)
    sigma = tuple(ident for _ in range(p))
    l = tuple(
        tuple(((x1 * y2 - x2 * y1) * inv2) % p for y1 in range(p) for y2 in range(p))
        for x1 in range(p) for x2 in range(p)
    )
    m = tuple(tuple(0 for _ in range(p)) for _ in range(n))
    return ExternalSpec(B, H, sigma, l, m)
